"""Synthetic scenes and saliency generators.

Everything here exists so the metrics can be exercised end to end at desk
scale without a neural model: scenes of rectangles and ellipses with
closed-form ground-truth masks, Gaussian blobs as the canonical concentrated
explanation, and an equivariant renderer that plays the role of a perfectly
stable explainer for the transform protocols.

Pixel-center convention: grid index (r, c) is the pixel center, which sits at
(r + 0.5, c + 0.5) in the continuous coordinates used by polygon outlines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatch
from .grid import BinaryMask, SaliencyMap
from .resample import CropSpec, RngStream


@dataclass(frozen=True)
class Shape:
    """One placed shape with its class label.

    kind "rect": params = (top, left, height, width), integer pixel units.
    kind "ellipse": params = (center_row, center_col, radius_row, radius_col),
    floats in index space.
    """

    kind: str
    class_id: int
    params: tuple

    def __post_init__(self):
        if self.kind not in ("rect", "ellipse"):
            raise ConfigError(f"unknown shape kind {self.kind!r}")
        if len(self.params) != 4:
            raise ConfigError("shape params must have 4 entries")

    def centroid(self) -> tuple:
        if self.kind == "rect":
            top, left, hh, ww = self.params
            return (top + (hh - 1) / 2.0, left + (ww - 1) / 2.0)
        cy, cx, _, _ = self.params
        return (float(cy), float(cx))

    def mask(self, height: int, width: int) -> BinaryMask:
        """Analytic membership test evaluated at pixel centers."""
        if self.kind == "rect":
            top, left, hh, ww = (int(p) for p in self.params)
            bits = np.zeros((height, width), dtype=bool)
            bits[top : top + hh, left : left + ww] = True
            return BinaryMask(bits)
        cy, cx, ry, rx = self.params
        rr = (np.arange(height, dtype=np.float64) - cy)[:, None] / ry
        cc = (np.arange(width, dtype=np.float64) - cx)[None, :] / rx
        return BinaryMask(rr * rr + cc * cc <= 1.0)

    def outline(self, segments: int = 72) -> list:
        """Closed polygon outline as a flat [x0, y0, x1, y1, ...] list in
        continuous coordinates (pixel (r, c) center at (c+0.5, r+0.5))."""
        if self.kind == "rect":
            top, left, hh, ww = (float(p) for p in self.params)
            return [left, top, left + ww, top, left + ww, top + hh, left, top + hh]
        cy, cx, ry, rx = self.params
        pts = []
        for k in range(segments):
            theta = 2.0 * math.pi * k / segments
            pts.append(cx + 0.5 + rx * math.cos(theta))
            pts.append(cy + 0.5 + ry * math.sin(theta))
        return pts


@dataclass(frozen=True)
class SyntheticScene:
    """Image dims plus placed shapes; masks derive analytically from shapes."""

    height: int
    width: int
    shapes: tuple

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise DimensionMismatch("scene dims must be positive")
        for s in self.shapes:
            self._check_bounds(s)

    def _check_bounds(self, s: Shape) -> None:
        if s.kind == "rect":
            top, left, hh, ww = s.params
            ok = 0 <= top and 0 <= left and top + hh <= self.height and left + ww <= self.width
        else:
            cy, cx, ry, rx = s.params
            ok = cy - ry >= -0.5 and cx - rx >= -0.5
            ok = ok and cy + ry <= self.height - 0.5 and cx + rx <= self.width - 0.5
        if not ok:
            raise ConfigError(f"shape {s} exceeds scene bounds {self.height}x{self.width}")

    @property
    def class_ids(self) -> tuple:
        return tuple(sorted({s.class_id for s in self.shapes}))

    def shape_mask(self, index: int) -> BinaryMask:
        return self.shapes[index].mask(self.height, self.width)

    def class_mask(self, class_id: int) -> BinaryMask:
        """Union of all instance masks carrying class_id."""
        bits = np.zeros((self.height, self.width), dtype=bool)
        found = False
        for s in self.shapes:
            if s.class_id == class_id:
                bits |= s.mask(self.height, self.width).bits
                found = True
        if not found:
            raise ConfigError(f"scene has no shape with class_id {class_id}")
        return BinaryMask(bits)


def _center_coords(center) -> tuple:
    row = getattr(center, "row", None)
    if row is not None:
        return float(center.row), float(center.col)
    cy, cx = center
    return float(cy), float(cx)


def gaussian_saliency(dims, center, sigma: float, amplitude: float = 1.0) -> SaliencyMap:
    """Isotropic Gaussian blob: amplitude * exp(-((r-cr)^2+(c-cc)^2)/(2 sigma^2)).

    center may be a PixelLocation or a (row, col) pair; fractional centers are
    fine. Strictly positive everywhere, so the argmax is the grid point
    nearest the center.
    """
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if amplitude <= 0:
        raise ConfigError(f"amplitude must be positive, got {amplitude}")
    height, width = dims
    cr, cc = _center_coords(center)
    dr = (np.arange(height, dtype=np.float64) - cr)[:, None]
    dc = (np.arange(width, dtype=np.float64) - cc)[None, :]
    vals = amplitude * np.exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma))
    return SaliencyMap(vals)


def _anisotropic_gaussian(height, width, cr, cc, sigma_r, sigma_c, amplitude):
    dr = (np.arange(height, dtype=np.float64) - cr)[:, None] / sigma_r
    dc = (np.arange(width, dtype=np.float64) - cc)[None, :] / sigma_c
    return amplitude * np.exp(-0.5 * (dr * dr + dc * dc))


def equivariant_saliency(
    scene: SyntheticScene,
    crop: CropSpec | None = None,
    class_id: int | None = None,
    sigma: float = 8.0,
    amplitude: float = 1.0,
) -> SaliencyMap:
    """Render one Gaussian per shape centroid, in the post-crop frame.

    Without a crop this is a straight render at scene resolution. With one,
    centroids and sigma are mapped through the same crop-then-resize geometry
    the resampler uses, so by construction rendering-after-transform matches
    transforming-the-render up to resampling error. class_id limits rendering
    to the shapes of one class.
    """
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    shapes = [s for s in scene.shapes if class_id is None or s.class_id == class_id]
    if not shapes:
        raise ConfigError(f"scene has no shape with class_id {class_id}")

    if crop is None:
        out_h, out_w = scene.height, scene.width
        fr = fc = 1.0
        top = left = 0
    else:
        crop.validate_for(scene.height, scene.width)
        out_h, out_w = crop.out_height, crop.out_width
        fr = out_h / crop.side
        fc = out_w / crop.side
        top, left = crop.top, crop.left

    total = np.zeros((out_h, out_w), dtype=np.float64)
    for s in shapes:
        cy, cx = s.centroid()
        # same half-pixel-center mapping as the resampler
        cr = (cy - top + 0.5) * fr - 0.5
        cc = (cx - left + 0.5) * fc - 0.5
        total += _anisotropic_gaussian(out_h, out_w, cr, cc, sigma * fr, sigma * fc, amplitude)
    return SaliencyMap(total)


def random_scene(rng: RngStream, dims, n_shapes: int) -> SyntheticScene:
    """Deterministic scene with n_shapes non-degenerate in-bounds shapes.

    Draw order per shape: kind, geometry fields in the documented order,
    class. Every shape covers at least 16 pixels. class_id is drawn from
    1..min(n_shapes, 3) so multi-shape scenes exercise class unions.
    """
    if n_shapes < 1:
        raise ConfigError("n_shapes must be >= 1")
    height, width = dims
    if min(height, width) < 24:
        raise ConfigError("random_scene needs dims of at least 24x24")
    n_classes = min(n_shapes, 3)
    shapes = []
    for _ in range(n_shapes):
        kind = "rect" if rng.randint_below(2) == 0 else "ellipse"
        if kind == "rect":
            hh = 4 + rng.randint_below(max(1, height // 3 - 4))
            ww = 4 + rng.randint_below(max(1, width // 3 - 4))
            top = rng.randint_below(height - hh + 1)
            left = rng.randint_below(width - ww + 1)
            params = (top, left, hh, ww)
        else:
            ry = 2.5 + rng.uniform(0.0, max(1.0, height / 6.0 - 2.5))
            rx = 2.5 + rng.uniform(0.0, max(1.0, width / 6.0 - 2.5))
            cy = rng.uniform(ry - 0.5, height - 0.5 - ry)
            cx = rng.uniform(rx - 0.5, width - 0.5 - rx)
            params = (cy, cx, ry, rx)
        class_id = 1 + rng.randint_below(n_classes)
        shapes.append(Shape(kind=kind, class_id=class_id, params=params))
    return SyntheticScene(height=height, width=width, shapes=tuple(shapes))
