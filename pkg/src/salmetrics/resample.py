"""Bilinear resizing, crop application, and the deterministic crop sampler.

Sampling convention (documented so any implementation can reproduce it
bit-exactly):

* Resizing uses half-pixel centers: output pixel (r, c) samples source
  coordinate ((r + 0.5) * H / H' - 0.5, (c + 0.5) * W / W' - 0.5), clamped
  to the border. No corner alignment.
* Randomness comes from a SplitMix64 stream. State update is
  state += 0x9E3779B97F4A7C15 (mod 2^64) followed by the standard two-round
  mixer; the stream for record ordinal k is seeded with
  mix64(seed + (k + 1) * 0x9E3779B97F4A7C15 mod 2^64).
* Floats take the top 53 bits of a draw; bounded integers use rejection
  sampling so there is no modulo bias.
* Crop sampling draws the area fraction first, then top, then left.
  round() below means floor(x + 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CropOutOfBounds, SchemaError
from .grid import SaliencyMap

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """SplitMix64 draw stream, fully determined by (seed, stream_index).

    Streams are cheap to construct; derive one per record (stream_index =
    record ordinal) instead of sharing a stream across workers.
    """

    __slots__ = ("seed", "stream_index", "_state")

    def __init__(self, seed: int, stream_index: int = 0):
        if stream_index < 0:
            raise ValueError("stream_index must be >= 0")
        self.seed = seed & _MASK64
        self.stream_index = stream_index
        self._state = _mix64((self.seed + (stream_index + 1) * _GOLDEN) & _MASK64)

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform float in [lo, hi) from the top 53 bits of one draw."""
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def randint_below(self, n: int) -> int:
        """Uniform integer in {0..n-1}; rejection sampling, no modulo bias."""
        if n <= 0:
            raise ValueError(f"randint_below needs n >= 1, got {n}")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class CropSpec:
    """Square source window plus output resolution: a zoom/pan transform."""

    top: int
    left: int
    side: int
    out_height: int
    out_width: int

    def validate_for(self, height: int, width: int) -> None:
        if (
            self.top < 0
            or self.left < 0
            or self.side < 1
            or self.top + self.side > height
            or self.left + self.side > width
        ):
            raise CropOutOfBounds(
                f"crop (top={self.top}, left={self.left}, side={self.side}) "
                f"does not fit a {height}x{width} grid"
            )
        if self.out_height < 1 or self.out_width < 1:
            raise CropOutOfBounds("crop output dimensions must be >= 1")

    def to_dict(self) -> dict:
        return {
            "top": self.top,
            "left": self.left,
            "side": self.side,
            "out_h": self.out_height,
            "out_w": self.out_width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CropSpec":
        try:
            return cls(
                top=int(d["top"]),
                left=int(d["left"]),
                side=int(d["side"]),
                out_height=int(d["out_h"]),
                out_width=int(d["out_w"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad crop spec {d!r}: {exc}") from exc


def resize_array(values: np.ndarray, out_height: int, out_width: int) -> np.ndarray:
    """Bilinear resize of a 2-D float array, half-pixel-center convention.

    Interpolation uses the lerp form a + t*(b - a), which keeps constant
    inputs exactly constant and never overshoots the input min/max.
    """
    if out_height < 1 or out_width < 1:
        raise ValueError("output dimensions must be >= 1")
    h, w = values.shape
    if (out_height, out_width) == (h, w):
        return values
    values = np.asarray(values, dtype=np.float64)

    ys = np.clip((np.arange(out_height) + 0.5) * (h / out_height) - 0.5, 0.0, h - 1.0)
    xs = np.clip((np.arange(out_width) + 0.5) * (w / out_width) - 0.5, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    dy = (ys - y0)[:, None]
    dx = (xs - x0)[None, :]

    a = values[np.ix_(y0, x0)]
    b = values[np.ix_(y0, x1)]
    c = values[np.ix_(y1, x0)]
    d = values[np.ix_(y1, x1)]
    top = a + dx * (b - a)
    bottom = c + dx * (d - c)
    return top + dy * (bottom - top)


def bilinear_resize(map: SaliencyMap, out_height: int, out_width: int) -> SaliencyMap:
    """Resize a saliency map; same size in and out is the identity."""
    if (out_height, out_width) == map.shape:
        return map
    return SaliencyMap(resize_array(map.values, out_height, out_width))


def apply_crop(map: SaliencyMap, crop: CropSpec) -> SaliencyMap:
    """Extract the crop window, then bilinear-resize it to the output dims."""
    crop.validate_for(map.height, map.width)
    window = map.values[crop.top : crop.top + crop.side, crop.left : crop.left + crop.side]
    return SaliencyMap(resize_array(window, crop.out_height, crop.out_width))


def sample_crop(
    rng: RngStream,
    height: int,
    width: int,
    scale_min: float = 0.75,
    scale_max: float = 0.9,
) -> CropSpec:
    """Sample a square crop with area fraction uniform in [scale_min, scale_max].

    side = round(sqrt(s * height * width)) clamped to [1, min(height, width)];
    top and left are then uniform over the valid offsets. Output dims equal
    the source dims, so applying the crop zooms back to the input resolution.
    """
    if not (0.0 < scale_min <= scale_max <= 1.0):
        raise ValueError(f"need 0 < scale_min <= scale_max <= 1, got [{scale_min}, {scale_max}]")
    s = rng.uniform(scale_min, scale_max)
    side = _round_half_up(math.sqrt(s * height * width))
    side = max(1, min(side, height, width))
    top = rng.randint_below(height - side + 1)
    left = rng.randint_below(width - side + 1)
    return CropSpec(top=top, left=left, side=side, out_height=height, out_width=width)


def synthesize_zoom_sequence(
    image_height: int,
    image_width: int,
    frames: int = 150,
    max_zoom: float = 1.5,
) -> list[CropSpec]:
    """Centered planar zoom-in/zoom-out sequence of crops.

    The zoom factor ramps linearly from 1 to max_zoom over the first
    ceil(frames/2) frames and back down symmetrically, so frame 0 is the
    identity crop (for square inputs) and the apex frame has the smallest
    side. Every crop outputs at the source resolution.
    """
    if frames < 2:
        raise ValueError("need at least 2 frames")
    if max_zoom <= 1.0:
        raise ValueError("max_zoom must be > 1")
    base = min(image_height, image_width)
    apex = math.ceil(frames / 2)
    crops = []
    for i in range(frames):
        j = i if i <= apex else 2 * apex - i
        zoom = 1.0 + (max_zoom - 1.0) * (j / apex)
        side = max(1, _round_half_up(base / zoom))
        crops.append(
            CropSpec(
                top=(image_height - side) // 2,
                left=(image_width - side) // 2,
                side=side,
                out_height=image_height,
                out_width=image_width,
            )
        )
    return crops
