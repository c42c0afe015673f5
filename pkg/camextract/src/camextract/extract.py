"""Extraction jobs: many images, one model, one method, SMAPs out.

A job never dies on a bad pairing. Unknown models or methods, pairings
that cannot work, and images that fail to load are all recorded in the
manifest's ``errors`` list while the rest of the job proceeds. Output
maps are written as ``{image_id}_{class_id}.smap`` at input resolution,
so downstream mask-based scoring can discover them by name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import torch
import torch.nn.functional as F

from .cams import METHODS, attribute
from .errors import ConfigError, ExtractorError
from .models import INPUT_SIZE, MODELS, build_model, load_image, resolve_target
from .smap import write_smap

CLASS_MODES = ("annotation-class", "argmax-of-first-frame")

MANIFEST_FORMAT = "extraction-manifest"
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ExtractionJob:
    """Everything one extraction run needs.

    ``labels`` maps image ids (file stems) to class id lists and is only
    consulted in annotation-class mode. ``target_layer`` overrides the
    architecture's default hook point with a dotted module path.
    """

    model: str
    method: str
    images: tuple[str, ...]
    classes: str
    out_dir: str
    labels: Mapping[str, Sequence[int]] | None = None
    target_layer: str | None = None
    weights: str | None = None
    num_classes: int | None = None
    device: str = "cpu"
    ablation_chunk: int = 64


def _upscale(cam, size: int) -> "torch.Tensor":
    t = torch.from_numpy(cam)
    if t.shape == (size, size):
        return t
    return F.interpolate(t[None, None], size=(size, size), mode="bilinear", align_corners=False)[
        0, 0
    ]


def _classes_for(job: ExtractionJob, image_id: str) -> list[int]:
    if job.labels is None:
        raise ConfigError("annotation-class mode needs a labels mapping")
    raw = job.labels.get(image_id)
    if raw is None:
        return []
    return sorted({int(c) for c in raw})


def extract(job: ExtractionJob) -> dict:
    """Run one job and return its manifest (also written to disk)."""
    if job.classes not in CLASS_MODES:
        raise ConfigError(f"unknown class mode {job.classes!r}; known: {', '.join(CLASS_MODES)}")
    if not job.images:
        raise ConfigError("job has no input images")

    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    entries: list[dict] = []
    errors: list[dict] = []
    target_name = None

    def finish() -> dict:
        manifest = {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "model": job.model,
            "method": job.method,
            "classes": job.classes,
            "target_layer": target_name,
            "input_size": INPUT_SIZE,
            "entries": sorted(entries, key=lambda e: (e["image_id"], e["class_id"])),
            "errors": errors,
        }
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return manifest

    if job.method not in METHODS:
        errors.append({"error": f"unknown method {job.method!r}; known: {', '.join(METHODS)}"})
        return finish()
    try:
        model, spec = build_model(
            job.model, num_classes=job.num_classes, weights=job.weights, device=job.device
        )
        target, target_name = resolve_target(model, spec, job.target_layer)
    except ExtractorError as exc:
        errors.append({"error": str(exc)})
        return finish()
    if job.method == "guided-backprop" and not spec.relu_based:
        errors.append(
            {"error": f"guided-backprop is unsupported on {job.model}: not a ReLU network"}
        )
        return finish()

    shared_class = None
    if job.classes == "argmax-of-first-frame":
        first = job.images[0]
        try:
            x = load_image(first).to(job.device)
            with torch.no_grad():
                logits = model(x[None])
            shared_class = int(logits[0].argmax())
        except (OSError, ValueError) as exc:
            errors.append({"image_id": Path(first).stem, "error": f"first frame unusable: {exc}"})
            return finish()

    for path in job.images:
        image_id = Path(path).stem
        try:
            x = load_image(path).to(job.device)
        except (OSError, ValueError) as exc:
            errors.append({"image_id": image_id, "error": str(exc)})
            continue
        class_ids = [shared_class] if shared_class is not None else _classes_for(job, image_id)
        for class_id in class_ids:
            try:
                cam, score = attribute(
                    model,
                    x,
                    class_id,
                    job.method,
                    target,
                    to_spatial=spec.to_spatial,
                    channel_dim=spec.channel_dim,
                    relu_based=spec.relu_based,
                    ablation_chunk=job.ablation_chunk,
                )
            except ExtractorError as exc:
                errors.append({"image_id": image_id, "class_id": class_id, "error": str(exc)})
                continue
            name = f"{image_id}_{class_id}.smap"
            write_smap(_upscale(cam, INPUT_SIZE).numpy(), out_dir / name)
            entries.append(
                {"image_id": image_id, "class_id": class_id, "smap": name, "score": score}
            )

    return finish()
