"""Binary dilation of class masks.

The dilated mask marks every pixel within Chebyshev distance (size-1)/2 of a
true input pixel, which is exactly a binarized convolution of the mask with an
all-ones square kernel. Working on booleans keeps the operation exact: there
is no floating point anywhere in this module.

Border handling is zero padding: the structuring element is clipped at the
image boundary and the mask never grows past the borders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BinaryMask


@dataclass(frozen=True)
class KernelSpec:
    """Square structuring element; size is the full side length in pixels."""

    size: int = 9

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be odd and >= 1, got {self.size}")

    @property
    def radius(self) -> int:
        return (self.size - 1) // 2


def _shift_or_1d(bits: np.ndarray, radius: int, axis: int) -> np.ndarray:
    """OR of all shifts of `bits` by -radius..radius along `axis`, zero-filled."""
    out = bits.copy()
    for d in range(1, radius + 1):
        src_lo = [slice(None), slice(None)]
        src_hi = [slice(None), slice(None)]
        dst_lo = [slice(None), slice(None)]
        dst_hi = [slice(None), slice(None)]
        src_lo[axis] = slice(d, None)
        dst_lo[axis] = slice(None, -d)
        src_hi[axis] = slice(None, -d)
        dst_hi[axis] = slice(d, None)
        out[tuple(dst_lo)] |= bits[tuple(src_lo)]
        out[tuple(dst_hi)] |= bits[tuple(src_hi)]
    return out


def dilate(mask: BinaryMask, kernel: KernelSpec = KernelSpec()) -> BinaryMask:
    """Dilate with a square element, implemented as two separable 1-D passes.

    A square element is the Minkowski sum of a horizontal and a vertical
    segment, so the two-pass form is output-equivalent to the brute-force
    set dilation {p : exists q in M with |p - q|_inf <= radius}.
    Size 1 is the identity.
    """
    r = kernel.radius
    if r == 0:
        return mask
    rows = _shift_or_1d(mask.bits, r, axis=0)
    return BinaryMask(_shift_or_1d(rows, r, axis=1))


def dilate_disc(mask: BinaryMask, radius: int) -> BinaryMask:
    """Dilate with a Euclidean disc: offsets (dy, dx) with dy^2 + dx^2 <= radius^2.

    Used for the optional pointing-game pixel tolerance; radius 0 is the
    identity.
    """
    if radius < 0:
        raise ValueError(f"disc radius must be >= 0, got {radius}")
    if radius == 0:
        return mask
    bits = mask.bits
    h = bits.shape[0]
    out = np.zeros_like(bits)
    for dy in range(-radius, radius + 1):
        rx = int(np.floor(np.sqrt(radius * radius - dy * dy)))
        row_band = _shift_or_1d(bits, rx, axis=1) if rx > 0 else bits
        if dy == 0:
            out |= row_band
        elif dy > 0:
            out[dy:, :] |= row_band[: h - dy, :]
        else:
            out[: h + dy, :] |= row_band[-dy:, :]
    return BinaryMask(out)
