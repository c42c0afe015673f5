"""Command line front end.

Exit codes: 0 when at least one map was written, 2 for unusable
arguments, 3 when the job produced nothing (every pairing failed or the
image directory was empty).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cams import METHODS
from .errors import ExtractorError
from .extract import CLASS_MODES, ExtractionJob, extract
from .models import MODELS

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}


def _fail(message: str) -> int:
    print(f"extract: {message}", file=sys.stderr)
    return 2


def _load_labels(path: Path) -> dict[str, list[int]]:
    """Read a labels file in either of the two accepted shapes.

    A flat object maps image ids to class id arrays. A COCO-style object
    is reduced to the same thing from its ``annotations`` array.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("labels file must hold a JSON object")
    if "annotations" in doc:
        table: dict[str, set[int]] = {}
        for row in doc["annotations"]:
            table.setdefault(str(row["image_id"]), set()).add(int(row["category_id"]))
        return {k: sorted(v) for k, v in table.items()}
    out = {}
    for key, value in doc.items():
        out[str(key)] = sorted({int(c) for c in value})
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="extract class-activation saliency maps from a classifier",
    )
    parser.add_argument("--model", required=True, help=", ".join(sorted(MODELS)))
    parser.add_argument("--method", required=True, help=", ".join(METHODS))
    parser.add_argument("--images", required=True, help="directory of input images")
    parser.add_argument("--classes", required=True, choices=CLASS_MODES)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--labels", help="labels JSON for annotation-class mode")
    parser.add_argument("--weights", help="local checkpoint (state dict) to load")
    parser.add_argument("--num-classes", type=int, help="resize the head before loading weights")
    parser.add_argument("--target-layer", help="dotted module path overriding the default hook")
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    images_dir = Path(args.images)
    if not images_dir.is_dir():
        return _fail(f"images directory {images_dir} does not exist")
    paths = sorted(
        (p for p in images_dir.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES),
        key=lambda p: p.stem,
    )
    if not paths:
        print(f"extract: no images found under {images_dir}", file=sys.stderr)
        return 3

    labels = None
    if args.classes == "annotation-class":
        if args.labels is None:
            return _fail("--classes annotation-class needs --labels")
        try:
            labels = _load_labels(Path(args.labels))
        except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            return _fail(f"bad labels file: {exc}")

    job = ExtractionJob(
        model=args.model,
        method=args.method,
        images=tuple(str(p) for p in paths),
        classes=args.classes,
        out_dir=args.out,
        labels=labels,
        target_layer=args.target_layer,
        weights=args.weights,
        num_classes=args.num_classes,
        device=args.device,
    )
    try:
        manifest = extract(job)
    except ExtractorError as exc:
        return _fail(str(exc))

    for problem in manifest["errors"]:
        print(f"extract: warning: {problem}", file=sys.stderr)
    written = len(manifest["entries"])
    if written == 0:
        print("extract: nothing extracted", file=sys.stderr)
        return 3
    print(f"extract: wrote {written} maps to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
