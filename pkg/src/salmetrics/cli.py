"""Batch command-line driver.

Every pipeline is a subcommand over manifest-driven inputs. Runs are
deterministic: for fixed inputs, seed, and configuration the report bytes
are identical regardless of worker count, because records are computed
independently and merged in canonical input order and no volatile state
(timestamps, host names, worker counts) enters the output.

Saliency files are matched to annotations by name: `{image_id}_{class_id}`
with extension .smap or .png. Missing files are warned about and skipped,
never fatal.

Exit codes: 0 when at least one record was produced, 2 for configuration
problems, 3 when a run produced no records at all.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .accuracy import evaluate_mask, evaluate_pair
from .coco import load_mask_png, parse_annotations, scan_mask_dir
from .errors import (
    ConfigError,
    EmptyDataset,
    ManifestError,
    SalmetricsError,
)
from .formats import NegativePolicy, read_saliency, write_mask_png, write_gray_png, write_saliency
from .morphology import KernelSpec
from .report_io import ReportDocument, write_report
from .resample import CropSpec, RngStream, resize_array, sample_crop, synthesize_zoom_sequence
from .stability import (
    crop_stability_entry,
    frame_stability,
    load_crop_manifest,
    load_frame_manifest,
    FrameSequenceManifest,
)
from .synth import equivariant_saliency, random_scene

_NEGATIVE_ALIASES = {
    "error": NegativePolicy.ERROR,
    "clamp": NegativePolicy.CLAMP_TO_ZERO,
    "abs": NegativePolicy.ABSOLUTE_VALUE,
}


def _warn(msg: str) -> None:
    print(f"salmetrics: warning: {msg}", file=sys.stderr)


def _fail(msg: str) -> int:
    print(f"salmetrics: error: {msg}", file=sys.stderr)
    return 2


def _parallel_map(fn, tasks, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _find_saliency(directory: Path, image_id, class_id):
    base = f"{image_id}_{class_id}"
    for ext in (".smap", ".png"):
        candidate = directory / (base + ext)
        if candidate.exists():
            return candidate
    return None


# ---------------------------------------------------------------- accuracy

def _annotation_task(task):
    ordinal, ann, saliency_path, kernel_size, tolerance, policy_name = task
    try:
        saliency = read_saliency(saliency_path, NegativePolicy(policy_name))
        record = evaluate_pair(
            saliency, ann, kernel=KernelSpec(kernel_size), pointing_tolerance=tolerance
        )
        return ordinal, None, record
    except (SalmetricsError, OSError) as exc:
        return ordinal, f"{saliency_path}: {exc}", None


def _mask_task(task):
    ordinal, image_id, class_id, mask_path, saliency_path, kernel_size, tolerance, policy = task
    try:
        saliency = read_saliency(saliency_path, NegativePolicy(policy))
        mask = load_mask_png(mask_path)
        record = evaluate_mask(
            saliency,
            mask,
            image_id,
            class_id,
            kernel=KernelSpec(kernel_size),
            pointing_tolerance=tolerance,
        )
        return ordinal, None, record
    except (SalmetricsError, OSError) as exc:
        return ordinal, f"{saliency_path}: {exc}", None


def _emit_report(args, kind: str, metadata: dict, records) -> None:
    doc = ReportDocument(kind=kind, metadata=metadata, records=tuple(records))
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_report(doc, out, args.format)
    if args.figures:
        from .figures import render_figures  # lazy: pulls in matplotlib

        for p in render_figures(doc, out.parent, out.stem):
            print(f"wrote figure {p}")


def _cmd_accuracy(args, subcommand: str) -> int:
    if bool(args.annotations) == bool(args.masks_dir):
        return _fail("need exactly one of --annotations or --masks-dir")
    saliency_dir = Path(args.saliency_dir)
    if not saliency_dir.is_dir():
        return _fail(f"saliency directory {saliency_dir} does not exist")
    try:
        KernelSpec(args.dilate)
    except Exception as exc:
        return _fail(str(exc))
    policy = _NEGATIVE_ALIASES[args.negatives]

    tasks = []
    missing = 0
    if args.annotations:
        ann_path = Path(args.annotations)
        if not ann_path.is_file():
            return _fail(f"annotations file {ann_path} does not exist")
        try:
            sets = parse_annotations(ann_path, include_crowd=not args.exclude_crowd)
        except EmptyDataset as exc:
            _warn(str(exc))
            sets = []
        except SalmetricsError as exc:
            return _fail(str(exc))
        for ann in sets:
            path = _find_saliency(saliency_dir, ann.image_id, ann.class_id)
            if path is None:
                _warn(f"no saliency file for ({ann.image_id}, {ann.class_id}); skipped")
                missing += 1
                continue
            tasks.append(
                (len(tasks), ann, str(path), args.dilate, args.pointing_tolerance, policy.value)
            )
        worker_fn = _annotation_task
    else:
        masks_dir = Path(args.masks_dir)
        if not masks_dir.is_dir():
            return _fail(f"masks directory {masks_dir} does not exist")
        for image_id, class_id, mask_path in scan_mask_dir(masks_dir):
            path = _find_saliency(saliency_dir, image_id, class_id)
            if path is None:
                _warn(f"no saliency file for ({image_id}, {class_id}); skipped")
                missing += 1
                continue
            tasks.append(
                (
                    len(tasks),
                    image_id,
                    class_id,
                    str(mask_path),
                    str(path),
                    args.dilate,
                    args.pointing_tolerance,
                    policy.value,
                )
            )
        worker_fn = _mask_task

    results = _parallel_map(worker_fn, tasks, args.workers)
    records = []
    unreadable = 0
    for _, error, record in sorted(results, key=lambda r: r[0]):
        if error is not None:
            _warn(f"skipped: {error}")
            unreadable += 1
        else:
            records.append(record)
    if not records:
        print("salmetrics: no records produced", file=sys.stderr)
        return 3

    metadata = {
        "tool": "salmetrics",
        "tool_version": __version__,
        "subcommand": subcommand,
        "annotations": args.annotations,
        "masks_dir": args.masks_dir,
        "saliency_dir": args.saliency_dir,
        "kernel_size": args.dilate,
        "small_threshold": args.small_threshold,
        "pointing_tolerance": args.pointing_tolerance,
        "negative_policy": policy.value,
        "include_crowd": not args.exclude_crowd,
        "skipped_missing": missing,
        "skipped_unreadable": unreadable,
    }
    _emit_report(args, "accuracy", metadata, records)

    doc_summary = ReportDocument("accuracy", metadata, tuple(records)).summary_dict()
    if subcommand == "pointing-game":
        shown = ("mean pointing hit rate", doc_summary["mean_pointing_hit_rate"])
    else:
        shown = ("mean weighting accuracy", doc_summary["mean_weighting_accuracy"])
    print(
        f"{subcommand}: {len(records)} records "
        f"({missing + unreadable} skipped), {shown[0]} "
        f"{'n/a' if shown[1] is None else f'{shown[1]:.4f}'}"
    )
    return 0


# ---------------------------------------------------------------- stability

def _crop_task(task):
    ordinal, entry, seed, scale_min, scale_max, policy_name = task
    policy = NegativePolicy(policy_name)
    try:
        record = crop_stability_entry(
            entry,
            ordinal,
            master_seed=seed,
            scale_min=scale_min,
            scale_max=scale_max,
            loader=lambda p: read_saliency(p, policy),
        )
        return ordinal, None, record
    except (SalmetricsError, OSError) as exc:
        return ordinal, f"entry {ordinal} ({entry.subject_id}): {exc}", None


def _cmd_stability_crop(args) -> int:
    policy = _NEGATIVE_ALIASES[args.negatives]
    try:
        entries = load_crop_manifest(args.manifest)
    except ManifestError as exc:
        return _fail(str(exc))
    if args.scale_min <= 0 or args.scale_max > 1 or args.scale_min > args.scale_max:
        return _fail("need 0 < scale-min <= scale-max <= 1")

    tasks = [
        (i, entry, args.seed, args.scale_min, args.scale_max, policy.value)
        for i, entry in enumerate(entries)
    ]
    results = _parallel_map(_crop_task, tasks, args.workers)
    records = []
    unreadable = 0
    for _, error, record in sorted(results, key=lambda r: r[0]):
        if error is not None:
            _warn(f"skipped: {error}")
            unreadable += 1
        else:
            records.append(record)
    if not records:
        print("salmetrics: no records produced", file=sys.stderr)
        return 3

    metadata = {
        "tool": "salmetrics",
        "tool_version": __version__,
        "subcommand": "stability-crop",
        "manifest": args.manifest,
        "seed": args.seed,
        "scale_min": args.scale_min,
        "scale_max": args.scale_max,
        "negative_policy": policy.value,
        "skipped_unreadable": unreadable,
    }
    _emit_report(args, "stability", metadata, records)
    summary = ReportDocument("stability", metadata, tuple(records)).summary_dict()
    mean = summary["mean_correlation"]
    print(
        f"stability-crop: {len(records)} records ({unreadable} skipped), "
        f"mean correlation {'n/a' if mean is None else f'{mean:.4f}'}"
    )
    return 0


def _frames_task(task):
    ordinal, manifest, policy_name = task
    policy = NegativePolicy(policy_name)
    try:
        records = frame_stability(manifest, loader=lambda p: read_saliency(p, policy))
        return ordinal, None, records
    except (SalmetricsError, OSError) as exc:
        return ordinal, f"sequence {manifest.subject_id}: {exc}", None


def _parse_pairs(text: str) -> tuple:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            i, j = chunk.split(":")
            pairs.append((int(i), int(j)))
        except ValueError:
            raise ConfigError(f"bad --pairs entry {chunk!r}; expected i:j") from None
    if not pairs:
        raise ConfigError("--pairs given but empty")
    return tuple(pairs)


def _cmd_stability_frames(args) -> int:
    policy = _NEGATIVE_ALIASES[args.negatives]
    override = None
    if args.pairs:
        try:
            override = _parse_pairs(args.pairs)
        except ConfigError as exc:
            return _fail(str(exc))
    manifests = []
    for path in args.manifest:
        try:
            man = load_frame_manifest(path)
            if override is not None:
                man = FrameSequenceManifest(
                    subject_id=man.subject_id,
                    class_id=man.class_id,
                    frames=man.frames,
                    pairs=override,
                )
            manifests.append(man)
        except ManifestError as exc:
            return _fail(str(exc))

    tasks = [(i, man, policy.value) for i, man in enumerate(manifests)]
    results = _parallel_map(_frames_task, tasks, args.workers)
    records = []
    skipped = 0
    for _, error, recs in sorted(results, key=lambda r: r[0]):
        if error is not None:
            _warn(f"skipped: {error}")
            skipped += 1
        else:
            records.extend(recs)
    if not records:
        print("salmetrics: no records produced", file=sys.stderr)
        return 3

    metadata = {
        "tool": "salmetrics",
        "tool_version": __version__,
        "subcommand": "stability-frames",
        "manifests": list(args.manifest),
        "pairs": args.pairs,
        "negative_policy": policy.value,
        "skipped_sequences": skipped,
    }
    _emit_report(args, "stability", metadata, records)
    summary = ReportDocument("stability", metadata, tuple(records)).summary_dict()
    mean = summary["mean_correlation"]
    print(
        f"stability-frames: {len(records)} records over {len(manifests) - skipped} sequences, "
        f"mean correlation {'n/a' if mean is None else f'{mean:.4f}'}"
    )
    return 0


# ---------------------------------------------------------------- make-crops

def _crop_image_array(arr: np.ndarray, crop: CropSpec) -> np.ndarray:
    window = arr[crop.top : crop.top + crop.side, crop.left : crop.left + crop.side]
    out = resize_array(window.astype(np.float64), crop.out_height, crop.out_width)
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def _cmd_make_crops(args) -> int:
    images_dir = Path(args.images)
    if not images_dir.is_dir():
        return _fail(f"images directory {images_dir} does not exist")
    if args.scale_min <= 0 or args.scale_max > 1 or args.scale_min > args.scale_max:
        return _fail("need 0 < scale-min <= scale-max <= 1")
    out_dir = Path(args.out)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    saliency_dir = Path(args.saliency_dir) if args.saliency_dir else None
    if saliency_dir is not None and not saliency_dir.is_dir():
        return _fail(f"saliency directory {saliency_dir} does not exist")
    if saliency_dir is not None:
        (out_dir / "saliency").mkdir(parents=True, exist_ok=True)

    paths = sorted(images_dir.glob("*.png"), key=lambda p: p.stem)
    if not paths:
        print("salmetrics: no input images found", file=sys.stderr)
        return 3

    entries = []
    for ordinal, path in enumerate(paths):
        image_id = path.stem
        with Image.open(path) as im:
            mode = "L" if im.mode in ("L", "1", "I", "I;16") else "RGB"
            arr = np.asarray(im.convert(mode))
        h, w = arr.shape[0], arr.shape[1]
        crop = sample_crop(RngStream(args.seed, ordinal), h, w, args.scale_min, args.scale_max)
        if arr.ndim == 2:
            cropped = _crop_image_array(arr, crop)
        else:
            cropped = np.dstack(
                [_crop_image_array(arr[:, :, c], crop) for c in range(arr.shape[2])]
            )
        out_image = out_dir / "images" / path.name
        Image.fromarray(cropped, mode=mode).save(out_image)
        entry = {
            "image_id": image_id,
            "original_image": str(path),
            "cropped_image": f"images/{path.name}",
            "crop": crop.to_dict(),
        }
        if saliency_dir is not None:
            cropped_maps = []
            for sal in sorted(saliency_dir.glob(f"{image_id}_*")):
                if sal.suffix not in (".smap", ".png"):
                    continue
                saliency = read_saliency(sal, _NEGATIVE_ALIASES[args.negatives])
                if saliency.shape != (h, w):
                    _warn(f"{sal}: dims {saliency.shape} differ from image {h}x{w}; skipped")
                    continue
                from .resample import apply_crop

                out_map = out_dir / "saliency" / f"{sal.stem}.smap"
                write_saliency(apply_crop(saliency, crop), out_map)
                cropped_maps.append(f"saliency/{sal.stem}.smap")
            entry["cropped_saliency"] = cropped_maps
        entries.append(entry)

    manifest = {
        "seed": args.seed,
        "scale_min": args.scale_min,
        "scale_max": args.scale_max,
        "entries": entries,
    }
    with open(out_dir / "crops.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"make-crops: wrote {len(entries)} cropped images to {out_dir}")
    return 0


# ---------------------------------------------------------------- synth

_CLASS_LEVELS = {1: 90, 2: 170, 3: 250}


def _render_scene(scene) -> np.ndarray:
    img = np.zeros((scene.height, scene.width), dtype=np.uint8)
    for i, shape in enumerate(scene.shapes):
        level = _CLASS_LEVELS.get(shape.class_id, 60)
        img[scene.shape_mask(i).bits] = level
    return img


def _cmd_synth(args) -> int:
    try:
        h, w = (int(x) for x in args.dims.lower().split("x"))
    except ValueError:
        return _fail(f"bad --dims {args.dims!r}; expected HxW like 224x224")
    out_dir = Path(args.out)
    (out_dir / "masks").mkdir(parents=True, exist_ok=True)
    (out_dir / "saliency").mkdir(parents=True, exist_ok=True)

    images = []
    annotations = []
    scene_rows = []
    category_ids = set()
    crop_entries = []
    frame_manifests = []

    try:
        scenes = [
            (i + 1, random_scene(RngStream(args.seed, i), (h, w), args.shapes))
            for i in range(args.count)
        ]
    except (ConfigError, SalmetricsError) as exc:
        return _fail(str(exc))

    pair_ordinal = 0
    for image_id, scene in scenes:
        images.append(
            {"id": image_id, "height": h, "width": w, "file_name": f"images/{image_id}.png"}
        )
        for shape in scene.shapes:
            annotations.append(
                {
                    "id": len(annotations) + 1,
                    "image_id": image_id,
                    "category_id": shape.class_id,
                    "segmentation": [shape.outline()],
                    "iscrowd": 0,
                }
            )
            category_ids.add(shape.class_id)
        scene_rows.append(
            {
                "image_id": image_id,
                "shapes": [
                    {"kind": s.kind, "class_id": s.class_id, "params": list(s.params)}
                    for s in scene.shapes
                ],
            }
        )

        for class_id in scene.class_ids:
            write_mask_png(
                scene.class_mask(class_id), out_dir / "masks" / f"{image_id}_{class_id}.png"
            )
            saliency = equivariant_saliency(scene, class_id=class_id, sigma=args.sigma)
            write_saliency(saliency, out_dir / "saliency" / f"{image_id}_{class_id}.smap")

            if args.crops:
                (out_dir / "saliency_crops").mkdir(exist_ok=True)
                crop = sample_crop(
                    RngStream(args.seed, 1_000_000 + pair_ordinal),
                    h,
                    w,
                    args.scale_min,
                    args.scale_max,
                )
                transformed = equivariant_saliency(
                    scene, crop=crop, class_id=class_id, sigma=args.sigma
                )
                name = f"{image_id}_{class_id}.smap"
                write_saliency(transformed, out_dir / "saliency_crops" / name)
                crop_entries.append(
                    {
                        "subject_id": image_id,
                        "class_id": class_id,
                        "original": f"saliency/{name}",
                        "transformed": f"saliency_crops/{name}",
                        "crop": crop.to_dict(),
                    }
                )
            pair_ordinal += 1

        if args.frames:
            seq_dir = out_dir / "frames" / str(image_id)
            seq_dir.mkdir(parents=True, exist_ok=True)
            class_id = scene.class_ids[0]
            names = []
            for k, crop in enumerate(
                synthesize_zoom_sequence(h, w, frames=args.frames, max_zoom=args.max_zoom)
            ):
                frame = equivariant_saliency(scene, crop=crop, class_id=class_id, sigma=args.sigma)
                name = f"frame_{k:04d}.smap"
                write_saliency(frame, seq_dir / name)
                names.append(name)
            manifest = {"subject_id": image_id, "class_id": class_id, "frames": names}
            with open(seq_dir / "manifest.json", "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, sort_keys=True, indent=2)
                fh.write("\n")
            frame_manifests.append(str(seq_dir / "manifest.json"))

        if args.render:
            (out_dir / "images").mkdir(exist_ok=True)
            Image.fromarray(_render_scene(scene), mode="L").save(
                out_dir / "images" / f"{image_id}.png"
            )

    coco_doc = {
        "images": images,
        "annotations": annotations,
        "categories": [{"id": c, "name": f"class{c}"} for c in sorted(category_ids)],
    }
    with open(out_dir / "annotations.json", "w", encoding="utf-8") as fh:
        json.dump(coco_doc, fh, sort_keys=True, indent=2)
        fh.write("\n")

    scene_doc = {
        "seed": args.seed,
        "dims": [h, w],
        "shapes_per_scene": args.shapes,
        "sigma": args.sigma,
        "scenes": scene_rows,
    }
    with open(out_dir / "scenes.json", "w", encoding="utf-8") as fh:
        json.dump(scene_doc, fh, sort_keys=True, indent=2)
        fh.write("\n")

    if args.crops:
        crops_doc = {
            "seed": args.seed,
            "scale_min": args.scale_min,
            "scale_max": args.scale_max,
            "entries": crop_entries,
        }
        with open(out_dir / "crops_manifest.json", "w", encoding="utf-8") as fh:
            json.dump(crops_doc, fh, sort_keys=True, indent=2)
            fh.write("\n")

    extras = []
    if args.crops:
        extras.append(f"{len(crop_entries)} crop pairs")
    if args.frames:
        extras.append(f"{len(frame_manifests)} frame sequences of {args.frames}")
    suffix = f" ({', '.join(extras)})" if extras else ""
    print(f"synth: wrote {len(scenes)} scenes to {out_dir}{suffix}")
    return 0


# ---------------------------------------------------------------- parser

def _add_report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="report output path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--figures", action="store_true", help="render PNG figures beside the report")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument(
        "--negatives",
        choices=tuple(_NEGATIVE_ALIASES),
        default="error",
        help="handling of negative saliency values",
    )


def _add_accuracy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--annotations", help="COCO-schema annotation JSON")
    p.add_argument("--masks-dir", help="directory of {image_id}_{class_id}.png masks")
    p.add_argument("--saliency-dir", required=True, help="directory of saliency files")
    p.add_argument("--dilate", type=int, default=9, help="square dilation kernel size (odd)")
    p.add_argument("--small-threshold", type=float, default=0.10,
                   help="mask area fraction below which an object counts as small")
    p.add_argument("--pointing-tolerance", type=int, default=0,
                   help="hit tolerance radius in pixels")
    p.add_argument("--exclude-crowd", action="store_true", help="drop crowd regions")
    _add_report_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salmetrics",
        description="Accuracy and stability metrics for class-guided saliency maps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weighting-game", help="mass-inside-mask accuracy over a dataset")
    _add_accuracy_flags(p)
    p.set_defaults(func=lambda a: _cmd_accuracy(a, "weighting-game"))

    p = sub.add_parser("pointing-game", help="argmax hit rate over a dataset")
    _add_accuracy_flags(p)
    p.set_defaults(func=lambda a: _cmd_accuracy(a, "pointing-game"))

    p = sub.add_parser("stability-crop", help="rank correlation under crop transforms")
    p.add_argument("--manifest", required=True, help="crop-batch manifest JSON")
    p.add_argument("--seed", type=int, default=0, help="master seed for sampled crops")
    p.add_argument("--scale-min", type=float, default=0.75)
    p.add_argument("--scale-max", type=float, default=0.9)
    _add_report_flags(p)
    p.set_defaults(func=_cmd_stability_crop)

    p = sub.add_parser("stability-frames", help="rank correlation of consecutive frames")
    p.add_argument("--manifest", required=True, action="append",
                   help="frame-sequence manifest JSON (repeatable)")
    p.add_argument("--pairs", help="override pair selection, e.g. 0:1,30:31")
    _add_report_flags(p)
    p.set_defaults(func=_cmd_stability_frames)

    p = sub.add_parser("make-crops", help="sample crops and emit cropped inputs")
    p.add_argument("--images", required=True, help="directory of {image_id}.png inputs")
    p.add_argument("--saliency-dir", help="also crop matching saliency files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale-min", type=float, default=0.75)
    p.add_argument("--scale-max", type=float, default=0.9)
    p.add_argument(
        "--negatives", choices=tuple(_NEGATIVE_ALIASES), default="error",
        help="handling of negative saliency values",
    )
    p.set_defaults(func=_cmd_make_crops)

    p = sub.add_parser("synth", help="generate a synthetic evaluation dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=8, help="number of scenes")
    p.add_argument("--dims", default="224x224", help="scene dims as HxW")
    p.add_argument("--shapes", type=int, default=3, help="shapes per scene")
    p.add_argument("--sigma", type=float, default=8.0, help="saliency blob width in pixels")
    p.add_argument("--crops", action="store_true", help="also emit crop stability pairs")
    p.add_argument("--scale-min", type=float, default=0.75)
    p.add_argument("--scale-max", type=float, default=0.9)
    p.add_argument("--frames", type=int, default=0,
                   help="emit a zoom sequence of this many frames per scene")
    p.add_argument("--max-zoom", type=float, default=1.5)
    p.add_argument("--render", action="store_true", help="also write rendered scene images")
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyDataset as exc:
        print(f"salmetrics: {exc}", file=sys.stderr)
        return 3
    except SalmetricsError as exc:
        print(f"salmetrics: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
