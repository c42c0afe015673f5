"""COCO-style annotation parsing and mask materialization.

Supports the three segmentation encodings found in COCO instance files:
polygon vertex lists, uncompressed column-major run-length counts, and the
compressed counts byte string. Per-class union masks are rasterized at the
image resolution.

Rasterization uses the pixel-center even-odd rule: a pixel is foreground iff
its center (col + 0.5, row + 0.5) lies inside a ring. This can differ from
scanline-fill tooling by boundary pixels, which downstream tolerances allow
for.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DegeneratePolygonWarning,
    EmptyDataset,
    ParseError,
    RleCorrupt,
    RleLengthMismatch,
    SchemaError,
)
from .grid import BinaryMask


@dataclass(frozen=True)
class InstanceShape:
    """One annotated instance: either polygon rings or run-length counts."""

    kind: str  # "polygon" | "rle"
    rings: tuple = ()  # polygon: flat (x0, y0, x1, y1, ...) tuples
    counts: tuple = ()  # uncompressed rle: run lengths, column-major
    compressed: bytes = b""  # compressed rle byte string (wins over counts)
    iscrowd: bool = False

    def materialize(self, height: int, width: int) -> BinaryMask:
        if self.kind == "polygon":
            return rasterize_polygon([list(r) for r in self.rings], height, width)
        if self.compressed:
            return decode_rle(self.compressed, height, width)
        return decode_rle(list(self.counts), height, width)


@dataclass(frozen=True)
class ClassAnnotationSet:
    """All instances of one class in one image, plus the image dimensions."""

    image_id: object
    image_height: int
    image_width: int
    class_id: object
    instances: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.instances:
            raise SchemaError("a class annotation set needs at least one instance")


def _expand_counts(data: bytes) -> list[int]:
    """Decode the compressed counts byte scheme into raw run lengths.

    Each count is stored LSB-first in 6-bit chunks (byte value minus 48):
    5 data bits, bit 0x20 continues, and bit 0x10 of the final chunk
    sign-extends. Counts after the first three are stored as deltas against
    the count two positions back.
    """
    counts: list[int] = []
    p = 0
    n = len(data)
    while p < n:
        x = 0
        k = 0
        while True:
            if p >= n:
                raise RleCorrupt("truncated run-length chunk")
            c = data[p] - 48
            if c < 0 or c > 63:
                raise RleCorrupt(f"byte {data[p]} at offset {p} outside counts alphabet")
            x |= (c & 0x1F) << (5 * k)
            p += 1
            k += 1
            if not c & 0x20:
                if c & 0x10:
                    x |= -1 << (5 * k)
                break
        if len(counts) > 2:
            x += counts[-2]
        if x < 0:
            raise RleCorrupt(f"negative run length {x} at count {len(counts)}")
        counts.append(x)
    return counts


def decode_rle(counts, height: int, width: int) -> BinaryMask:
    """Decode column-major run lengths (first run is background) to a mask.

    `counts` may be a list of run lengths, or the compressed byte string /
    ascii str emitted by COCO tooling.
    """
    if isinstance(counts, str):
        counts = counts.encode("ascii")
    if isinstance(counts, (bytes, bytearray)):
        counts = _expand_counts(bytes(counts))
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise RleCorrupt("negative run length")
    total = sum(counts)
    if total != height * width:
        raise RleLengthMismatch(f"run lengths sum to {total}, expected {height * width}")
    flat = np.repeat(np.arange(len(counts), dtype=np.uint8) % 2, counts).astype(bool)
    return BinaryMask(flat.reshape((height, width), order="F"))


def _ring_is_collinear(xs: np.ndarray, ys: np.ndarray) -> bool:
    # Zero shoelace area means no interior at all.
    area2 = np.sum(xs * np.roll(ys, -1) - np.roll(xs, -1) * ys)
    return area2 == 0.0


def rasterize_polygon(polygons: list, height: int, width: int) -> BinaryMask:
    """Rasterize rings with the pixel-center even-odd rule; union over rings.

    Vertex coordinates are clamped to the image bounds first, since real
    annotation files overshoot slightly. A collinear ring rasterizes empty
    and emits DegeneratePolygonWarning.
    """
    out = np.zeros((height, width), dtype=bool)
    for ring in polygons:
        coords = np.asarray(ring, dtype=np.float64)
        if coords.size % 2 != 0:
            raise SchemaError(f"polygon ring has odd coordinate count {coords.size}")
        if coords.size < 6:
            raise SchemaError(f"polygon ring has {coords.size // 2} vertices, need >= 3")
        xs = np.clip(coords[0::2], 0.0, float(width))
        ys = np.clip(coords[1::2], 0.0, float(height))
        if _ring_is_collinear(xs, ys):
            warnings.warn("collinear polygon ring rasterized empty", DegeneratePolygonWarning)
            continue
        out |= _rasterize_ring(xs, ys, height, width)
    return BinaryMask(out)


def _rasterize_ring(xs: np.ndarray, ys: np.ndarray, height: int, width: int) -> np.ndarray:
    # Parity toggles: a crossing at x toggles every pixel center left of it.
    # diff holds prefix increments per scanline; odd cumulative count = inside.
    diff = np.zeros((height, width + 1), dtype=np.int32)
    x2 = np.roll(xs, -1)
    y2 = np.roll(ys, -1)
    for ex1, ey1, ex2, ey2 in zip(xs, ys, x2, y2):
        if ey1 == ey2:
            continue
        ylo, yhi = (ey1, ey2) if ey1 < ey2 else (ey2, ey1)
        # scanlines with center py = r + 0.5 in the half-open span [ylo, yhi)
        r0 = max(0, int(np.ceil(ylo - 0.5)))
        r1 = min(height - 1, int(np.ceil(yhi - 0.5)) - 1)
        if r1 < r0:
            continue
        rows = np.arange(r0, r1 + 1)
        py = rows + 0.5
        xint = ex1 + (py - ey1) * (ex2 - ex1) / (ey2 - ey1)
        # the crossing covers pixel centers with col + 0.5 < xint
        c0 = np.clip(np.ceil(xint - 0.5).astype(np.int64), 0, width)
        diff[rows, 0] += 1
        np.add.at(diff, (rows, c0), -1)
    return (np.cumsum(diff[:, :width], axis=1) % 2).astype(bool)


def class_union_mask(annotation_set: ClassAnnotationSet) -> BinaryMask:
    """Pixel-wise OR of all instance masks, at image resolution."""
    h, w = annotation_set.image_height, annotation_set.image_width
    out = np.zeros((h, w), dtype=bool)
    for inst in annotation_set.instances:
        out |= inst.materialize(h, w).bits
    return BinaryMask(out)


def _instance_from_segmentation(segmentation, iscrowd: bool, height: int, width: int) -> InstanceShape | None:
    if isinstance(segmentation, list):
        rings = []
        for ring in segmentation:
            if not isinstance(ring, list):
                raise SchemaError("polygon segmentation must be a list of coordinate lists")
            if len(ring) % 2 != 0:
                raise SchemaError(f"polygon ring has odd coordinate count {len(ring)}")
            if len(ring) < 6:
                warnings.warn(
                    f"dropping polygon ring with {len(ring) // 2} vertices",
                    DegeneratePolygonWarning,
                )
                continue
            rings.append(tuple(float(v) for v in ring))
        if not rings:
            return None
        return InstanceShape(kind="polygon", rings=tuple(rings), iscrowd=iscrowd)
    if isinstance(segmentation, dict):
        size = segmentation.get("size")
        if size is not None and (int(size[0]), int(size[1])) != (height, width):
            raise SchemaError(
                f"rle size {size} does not match image dimensions {(height, width)}"
            )
        counts = segmentation.get("counts")
        if isinstance(counts, str):
            return InstanceShape(kind="rle", compressed=counts.encode("ascii"), iscrowd=iscrowd)
        if isinstance(counts, list):
            return InstanceShape(kind="rle", counts=tuple(int(c) for c in counts), iscrowd=iscrowd)
        raise SchemaError("rle segmentation needs a 'counts' list or string")
    raise SchemaError(f"unsupported segmentation type {type(segmentation).__name__}")


def _id_sort_key(value):
    if isinstance(value, (int, float)):
        return (0, value, "")
    return (1, 0, str(value))


def parse_annotations(
    path,
    category_filter=None,
    include_crowd: bool = True,
) -> list[ClassAnnotationSet]:
    """Parse a COCO-schema annotation document into per-(image, class) sets.

    Returns one ClassAnnotationSet per (image, class) pair with at least one
    usable instance, ordered by (image_id, class_id). Annotations that
    reference unknown images are skipped with a warning; crowd regions are
    kept unless include_crowd is False.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc

    for key in ("images", "annotations", "categories"):
        if key not in doc or not isinstance(doc[key], list):
            raise SchemaError(f"annotation document missing '{key}' array")

    dims = {}
    for img in doc["images"]:
        try:
            dims[img["id"]] = (int(img["height"]), int(img["width"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad image entry {img!r}: {exc}") from exc

    known_categories = {c.get("id") for c in doc["categories"]}
    groups: dict = {}
    for ann in doc["annotations"]:
        try:
            image_id = ann["image_id"]
            class_id = ann["category_id"]
            segmentation = ann["segmentation"]
        except KeyError as exc:
            raise SchemaError(f"annotation missing key {exc}") from exc
        iscrowd = bool(ann.get("iscrowd", 0))
        if category_filter is not None and class_id not in category_filter:
            continue
        if not include_crowd and iscrowd:
            continue
        if image_id not in dims:
            warnings.warn(f"annotation references unknown image {image_id!r}; skipped")
            continue
        if class_id not in known_categories:
            warnings.warn(f"annotation references unknown category {class_id!r}; skipped")
            continue
        h, w = dims[image_id]
        inst = _instance_from_segmentation(segmentation, iscrowd, h, w)
        if inst is None:
            continue
        groups.setdefault((image_id, class_id), []).append(inst)

    sets = [
        ClassAnnotationSet(
            image_id=image_id,
            image_height=dims[image_id][0],
            image_width=dims[image_id][1],
            class_id=class_id,
            instances=tuple(instances),
        )
        for (image_id, class_id), instances in groups.items()
    ]
    sets.sort(key=lambda s: (_id_sort_key(s.image_id), _id_sort_key(s.class_id)))
    if not sets:
        raise EmptyDataset(f"no usable (image, class) pairs in {path}")
    return sets


def load_mask_png(path) -> BinaryMask:
    """Read an 8-bit grayscale PNG mask; any non-zero pixel is foreground."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return BinaryMask(arr > 0)


def scan_mask_dir(directory) -> list[tuple]:
    """Find `{image_id}_{class_id}.png` masks; returns (image_id, class_id, path).

    All-digit id fields are parsed as integers so ordering matches annotation
    parsing. Sorted by (image_id, class_id).
    """
    entries = []
    for p in Path(directory).glob("*.png"):
        stem = p.stem
        if "_" not in stem:
            continue
        image_part, class_part = stem.rsplit("_", 1)
        image_id = int(image_part) if image_part.isdigit() else image_part
        class_id = int(class_part) if class_part.isdigit() else class_part
        entries.append((image_id, class_id, p))
    entries.sort(key=lambda e: (_id_sort_key(e[0]), _id_sort_key(e[1])))
    return entries
