"""Core grid types and the primitive reductions every metric is built from.

A saliency map is an H x W grid of non-negative, finite magnitudes; a binary
mask is an H x W boolean grid. Both are immutable once constructed, so they
can be shared freely across threads or worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeValues, NonFiniteValues


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SaliencyMap:
    """Immutable H x W grid of non-negative float64 magnitudes."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionMismatch(f"saliency map must be 2-D and non-empty, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteValues("saliency map contains NaN or infinite values")
        if np.any(v < 0):
            raise NegativeValues("saliency map contains negative values")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class BinaryMask:
    """Immutable H x W boolean grid."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.dtype != np.bool_:
            b = b.astype(np.bool_)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise DimensionMismatch(f"mask must be 2-D and non-empty, got shape {b.shape}")
        object.__setattr__(self, "bits", _freeze(b))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def __invert__(self) -> "BinaryMask":
        return BinaryMask(~self.bits)

    def __or__(self, other: "BinaryMask") -> "BinaryMask":
        _require_same_shape(self, other)
        return BinaryMask(self.bits | other.bits)


@dataclass(frozen=True)
class PixelLocation:
    """A (row, col) coordinate into a specific grid."""

    row: int
    col: int


def _require_same_shape(a, b) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")


def total_mass(map: SaliencyMap) -> float:
    """Sum of all saliency values.

    Accumulated in float64 with numpy's pairwise (compensated-class)
    summation, so results are reproducible for a fixed grid regardless
    of how many grids are processed concurrently.
    """
    return float(np.sum(map.values))


def masked_mass(map: SaliencyMap, mask: BinaryMask) -> float:
    """Sum of saliency values on the mask's true pixels.

    Summation runs over a full-shape array with masked-out entries set to
    zero, which keeps the accumulation tree identical for every mask of the
    same shape. This makes the result exactly monotone in the mask: growing
    the mask can never decrease the computed sum.
    """
    _require_same_shape(map, mask)
    return float(np.sum(np.where(mask.bits, map.values, 0.0)))


def argmax_location(map: SaliencyMap) -> PixelLocation:
    """Location of the maximum value; ties broken by smallest row-major index.

    Constant maps are not an error here: they return (0, 0) and callers that
    build records flag them via is_constant().
    """
    idx = int(np.argmax(map.values))
    return PixelLocation(row=idx // map.width, col=idx % map.width)


def is_constant(map: SaliencyMap) -> bool:
    """True when every value is equal, i.e. the argmax is meaningless."""
    v = map.values
    return bool(np.all(v == v.flat[0]))


def area_fraction(mask: BinaryMask) -> float:
    """Fraction of true pixels, in [0, 1]. Integer counting, one division."""
    return int(np.count_nonzero(mask.bits)) / (mask.height * mask.width)
