"""Accuracy metrics for class-guided saliency maps.

Two complementary measures per (image, class) pair:

* weighting accuracy: the fraction of total saliency mass that falls inside
  the dilated class segmentation mask. Graded in [0, 1] and scale invariant.
* pointing hit: whether the single highest-magnitude pixel lands inside the
  (undilated) class mask. Binary, so near misses score zero.

A uniformly spread saliency map scores exactly the dilated mask's area
fraction on the weighting metric, which makes that fraction the natural
chance baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coco import ClassAnnotationSet, class_union_mask
from .errors import DimensionMismatch, EmptyAggregate, ZeroMassSaliency
from .grid import (
    BinaryMask,
    SaliencyMap,
    area_fraction,
    argmax_location,
    is_constant,
    masked_mass,
    total_mass,
)
from .morphology import KernelSpec, dilate, dilate_disc
from .resample import bilinear_resize


@dataclass(frozen=True)
class AccuracyRecord:
    """One (image, class) measurement."""

    image_id: object
    class_id: object
    weighting_accuracy: float
    pointing_hit: bool
    mask_area_fraction: float
    dilated_mask_area_fraction: float
    degenerate: bool
    provenance: str = ""


@dataclass(frozen=True)
class AccuracySummary:
    records: int
    evaluated: int
    degenerate: int
    mean_weighting_accuracy: float | None
    mean_pointing_hit_rate: float | None
    mean_uniform_baseline: float | None
    small_threshold: float
    small_count: int
    mean_weighting_accuracy_small: float | None


def weighting_game(saliency: SaliencyMap, dilated_mask: BinaryMask) -> float:
    """Saliency mass inside the mask divided by total mass, in [0, 1]."""
    if saliency.shape != dilated_mask.shape:
        raise DimensionMismatch(f"saliency {saliency.shape} vs mask {dilated_mask.shape}")
    total = total_mass(saliency)
    if total == 0.0:
        raise ZeroMassSaliency("all-zero saliency map has no mass to weight")
    return min(1.0, masked_mass(saliency, dilated_mask) / total)


def pointing_game(saliency: SaliencyMap, mask: BinaryMask) -> bool:
    """True iff the saliency argmax lands on a true pixel of the mask."""
    if saliency.shape != mask.shape:
        raise DimensionMismatch(f"saliency {saliency.shape} vs mask {mask.shape}")
    loc = argmax_location(saliency)
    return bool(mask.bits[loc.row, loc.col])


def uniform_baseline(dilated_mask: BinaryMask) -> float:
    """Weighting accuracy of uniformly distributed saliency: the area fraction."""
    return area_fraction(dilated_mask)


def evaluate_mask(
    saliency: SaliencyMap,
    mask: BinaryMask,
    image_id,
    class_id,
    kernel: KernelSpec = KernelSpec(),
    pointing_tolerance: int = 0,
) -> AccuracyRecord:
    """Measure one saliency map against one ready-made class mask.

    Pipeline order: dilation, then both metrics. A saliency map at a
    different resolution is bilinearly resized to the mask resolution first
    and the resize is noted in the record provenance. Zero-mass or constant
    maps yield a degenerate record (kept for counting, excluded from means
    by aggregate()).
    """
    provenance = ""
    if saliency.shape != mask.shape:
        provenance = (
            f"resized {saliency.height}x{saliency.width}->{mask.height}x{mask.width}"
        )
        saliency = bilinear_resize(saliency, mask.height, mask.width)

    dilated = dilate(mask, kernel)
    pointing_mask = dilate_disc(mask, pointing_tolerance) if pointing_tolerance > 0 else mask

    degenerate = is_constant(saliency)
    try:
        accuracy = weighting_game(saliency, dilated)
    except ZeroMassSaliency:
        accuracy = 0.0
        degenerate = True
    hit = pointing_game(saliency, pointing_mask)

    return AccuracyRecord(
        image_id=image_id,
        class_id=class_id,
        weighting_accuracy=accuracy,
        pointing_hit=hit,
        mask_area_fraction=area_fraction(mask),
        dilated_mask_area_fraction=area_fraction(dilated),
        degenerate=degenerate,
        provenance=provenance,
    )


def evaluate_pair(
    saliency: SaliencyMap,
    annotations: ClassAnnotationSet,
    kernel: KernelSpec = KernelSpec(),
    pointing_tolerance: int = 0,
) -> AccuracyRecord:
    """Measure one saliency map against one class annotation set.

    The class mask is the union of the set's instance masks; the rest is
    evaluate_mask() with the set's image and class ids.
    """
    return evaluate_mask(
        saliency,
        class_union_mask(annotations),
        annotations.image_id,
        annotations.class_id,
        kernel=kernel,
        pointing_tolerance=pointing_tolerance,
    )


def aggregate(records: list, small_threshold: float = 0.10) -> AccuracySummary:
    """Mean metrics over non-degenerate records, plus the small-object slice.

    The small-object slice keeps records whose undilated mask covers strictly
    less than small_threshold of the image. Means are folded over the record
    list in its given order, so results are independent of how the records
    were produced.
    """
    live = [r for r in records if not r.degenerate]
    if not live:
        raise EmptyAggregate("no non-degenerate records to aggregate")
    small = [r for r in live if r.mask_area_fraction < small_threshold]
    n = len(live)
    return AccuracySummary(
        records=len(records),
        evaluated=n,
        degenerate=len(records) - n,
        mean_weighting_accuracy=sum(r.weighting_accuracy for r in live) / n,
        mean_pointing_hit_rate=sum(1.0 for r in live if r.pointing_hit) / n,
        mean_uniform_baseline=sum(r.dilated_mask_area_fraction for r in live) / n,
        small_threshold=small_threshold,
        small_count=len(small),
        mean_weighting_accuracy_small=(
            sum(r.weighting_accuracy for r in small) / len(small) if small else None
        ),
    )
