"""Stability metrics: rank correlation of saliency maps under small transforms.

Two protocols:

* frames: correlate saliency maps of consecutive frames from a zoom/pan
  sequence (by default five evenly spaced pairs).
* crop: correlate the crop-then-resize of an original saliency map against
  the saliency map computed on the cropped image, once both live on the
  same grid.

Correlation is Spearman's rank-order coefficient with average ranks on ties.
Constant maps have undefined rank correlation; batch drivers record those
entries as degenerate instead of inventing a value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateRanks, DimensionMismatch, EmptyAggregate, ManifestError
from .grid import SaliencyMap
from .resample import CropSpec, RngStream, apply_crop, sample_crop


@dataclass(frozen=True)
class StabilityRecord:
    """One correlation measurement (or a degenerate placeholder)."""

    subject_id: object
    class_id: object
    protocol: str  # "frames" | "crop"
    correlation: float | None
    pair_index: int
    degenerate: bool


@dataclass(frozen=True)
class StabilitySummary:
    records: int
    evaluated: int
    degenerate: int
    mean_correlation: float | None
    per_subject: tuple = ()


@dataclass(frozen=True)
class FrameSequenceManifest:
    """Ordered saliency-map files for one subject plus the pair selection."""

    subject_id: object
    class_id: object
    frames: tuple
    pairs: tuple

    def __post_init__(self):
        if len(self.frames) < 2:
            raise ManifestError("frame sequence needs at least 2 frames")
        n = len(self.frames)
        for i, j in self.pairs:
            if j != i + 1 or i < 0 or j >= n:
                raise ManifestError(f"pair ({i}, {j}) is not a valid consecutive pair")


def default_frame_pairs(n_frames: int, count: int = 5) -> tuple:
    """Evenly spaced consecutive pairs starting at frame 0, stride n//count."""
    stride = max(1, n_frames // count)
    return tuple((k * stride, k * stride + 1) for k in range(count) if k * stride + 1 < n_frames)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    """Fractional ranks (1-based); exactly equal values share the average rank.

    No epsilon merging: float values are tied only when bit-equal.
    """
    order = np.argsort(v, kind="stable")
    sv = v[order]
    boundaries = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1], True])
    sizes = np.diff(boundaries)
    group_ranks = (boundaries[:-1] + boundaries[1:] - 1) * 0.5 + 1.0
    ranks = np.empty(v.size, dtype=np.float64)
    ranks[order] = np.repeat(group_ranks, sizes)
    return ranks


def spearman(a: SaliencyMap, b: SaliencyMap) -> float:
    """Spearman rank-order correlation of two same-shape maps, in [-1, 1].

    Flattens row-major, assigns average ranks to ties, and returns the
    Pearson correlation of the rank vectors. Identical (or perfectly
    reversed) rank vectors short-circuit to exactly +/-1.
    """
    if a.shape != b.shape:
        raise DimensionMismatch(f"map shapes {a.shape} vs {b.shape}")
    va = a.values.ravel()
    vb = b.values.ravel()
    if np.all(va == va[0]) or np.all(vb == vb[0]):
        raise DegenerateRanks("constant map has no rank order")
    ra = _average_ranks(va)
    rb = _average_ranks(vb)
    if np.array_equal(ra, rb):
        return 1.0
    if np.array_equal(ra + rb, np.full(ra.size, ra.size + 1.0)):
        return -1.0
    da = ra - ra.mean()
    db = rb - rb.mean()
    rho = float(np.sum(da * db) / np.sqrt(np.sum(da * da) * np.sum(db * db)))
    return max(-1.0, min(1.0, rho))


def crop_stability(
    original_saliency: SaliencyMap,
    transformed_saliency: SaliencyMap,
    crop: CropSpec,
) -> float:
    """Correlate crop-then-resize of the original map with the transformed map."""
    if transformed_saliency.shape != (crop.out_height, crop.out_width):
        raise DimensionMismatch(
            f"transformed map {transformed_saliency.shape} vs crop output "
            f"{(crop.out_height, crop.out_width)}"
        )
    return spearman(apply_crop(original_saliency, crop), transformed_saliency)


def _load_map(path) -> SaliencyMap:
    from .formats import read_saliency  # local import: formats sits above this module

    return read_saliency(path)


def frame_stability(manifest: FrameSequenceManifest, loader=None) -> list:
    """One StabilityRecord per selected consecutive-frame pair.

    `loader` maps a file reference to a SaliencyMap; defaults to the
    package's saliency reader. pair_index is the first frame index of the
    pair.
    """
    load = loader or _load_map
    maps = {}
    for i, j in manifest.pairs:
        for idx in (i, j):
            if idx not in maps:
                maps[idx] = load(manifest.frames[idx])
    records = []
    for i, j in manifest.pairs:
        try:
            rho = spearman(maps[i], maps[j])
            degenerate = False
        except DegenerateRanks:
            rho = None
            degenerate = True
        records.append(
            StabilityRecord(
                subject_id=manifest.subject_id,
                class_id=manifest.class_id,
                protocol="frames",
                correlation=rho,
                pair_index=i,
                degenerate=degenerate,
            )
        )
    return records


@dataclass(frozen=True)
class CropBatchEntry:
    """One original/transformed map pair; crop may be omitted and sampled."""

    subject_id: object
    class_id: object
    original: object
    transformed: object
    crop: CropSpec | None = None


def crop_stability_entry(
    entry: "CropBatchEntry",
    ordinal: int,
    master_seed: int = 0,
    scale_min: float = 0.75,
    scale_max: float = 0.9,
    loader=None,
) -> StabilityRecord:
    """Evaluate one crop-manifest entry.

    If the entry carries no CropSpec, one is sampled from (master_seed,
    ordinal), so results do not depend on evaluation order or parallelism.
    pair_index records the ordinal.
    """
    load = loader or _load_map
    original = load(entry.original)
    transformed = load(entry.transformed)
    crop = entry.crop
    if crop is None:
        crop = sample_crop(
            RngStream(master_seed, ordinal),
            original.height,
            original.width,
            scale_min,
            scale_max,
        )
    try:
        rho = crop_stability(original, transformed, crop)
        degenerate = False
    except DegenerateRanks:
        rho = None
        degenerate = True
    return StabilityRecord(
        subject_id=entry.subject_id,
        class_id=entry.class_id,
        protocol="crop",
        correlation=rho,
        pair_index=ordinal,
        degenerate=degenerate,
    )


def crop_stability_batch(
    entries: list,
    master_seed: int = 0,
    scale_min: float = 0.75,
    scale_max: float = 0.9,
    loader=None,
) -> list:
    """Evaluate crop stability over a whole manifest, in order."""
    return [
        crop_stability_entry(entry, ordinal, master_seed, scale_min, scale_max, loader)
        for ordinal, entry in enumerate(entries)
    ]


def aggregate_stability(records: list) -> StabilitySummary:
    """Pooled mean correlation over non-degenerate records, plus per-subject means."""
    live = [r for r in records if not r.degenerate]
    if not live:
        raise EmptyAggregate("no non-degenerate stability records to aggregate")

    by_subject: dict = {}
    for r in live:
        by_subject.setdefault((r.subject_id, r.class_id), []).append(r.correlation)
    per_subject = tuple(
        {
            "subject_id": subject_id,
            "class_id": class_id,
            "mean_correlation": sum(vals) / len(vals),
            "pairs": len(vals),
        }
        for (subject_id, class_id), vals in sorted(
            by_subject.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
        )
    )
    return StabilitySummary(
        records=len(records),
        evaluated=len(live),
        degenerate=len(records) - len(live),
        mean_correlation=sum(r.correlation for r in live) / len(live),
        per_subject=per_subject,
    )


def load_frame_manifest(path) -> FrameSequenceManifest:
    """Read a frame-sequence manifest JSON; relative frame paths resolve
    against the manifest's directory.

    Schema: {"subject_id": ..., "class_id": ..., "frames": [path, ...],
    "pairs": [[i, i+1], ...]?}. Missing "pairs" selects the default five
    evenly spaced pairs.
    """
    base = Path(path).parent
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read frame manifest {path}: {exc}") from exc
    try:
        frames = tuple(str(base / f) for f in doc["frames"])
        pairs = doc.get("pairs")
        subject_id = doc["subject_id"]
        class_id = doc.get("class_id")
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"frame manifest {path} missing key: {exc}") from exc
    if pairs is None:
        pairs = default_frame_pairs(len(frames))
    else:
        pairs = tuple((int(i), int(j)) for i, j in pairs)
    return FrameSequenceManifest(
        subject_id=subject_id, class_id=class_id, frames=frames, pairs=pairs
    )


def load_crop_manifest(path) -> list:
    """Read a crop-batch manifest JSON into CropBatchEntry objects.

    Schema: {"entries": [{"subject_id": ..., "class_id": ..., "original":
    path, "transformed": path, "crop": {top,left,side,out_h,out_w}?}]}.
    Relative paths resolve against the manifest's directory.
    """
    base = Path(path).parent
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read crop manifest {path}: {exc}") from exc
    raw = doc.get("entries")
    if not isinstance(raw, list):
        raise ManifestError(f"crop manifest {path} needs an 'entries' array")
    entries = []
    for item in raw:
        try:
            entries.append(
                CropBatchEntry(
                    subject_id=item["subject_id"],
                    class_id=item.get("class_id"),
                    original=str(base / item["original"]),
                    transformed=str(base / item["transformed"]),
                    crop=CropSpec.from_dict(item["crop"]) if "crop" in item else None,
                )
            )
        except (KeyError, TypeError) as exc:
            raise ManifestError(f"bad crop manifest entry {item!r}: {exc}") from exc
    return entries
