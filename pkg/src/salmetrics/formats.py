"""Saliency and mask file formats.

SMAP is the package's portable saliency container: a 13-byte header
(magic "SMAP", version byte 1, then height and width as 32-bit little-endian
unsigned ints) followed by height*width 32-bit little-endian IEEE-754 floats
in row-major order. Grayscale PNG (8- or 16-bit) is accepted as a lossy-free
alternative with integer levels mapped linearly onto [0, 1].

Signed inputs: some attribution methods emit negative values, but mass-based
metrics need non-negative maps. NegativePolicy decides what happens; the
default is to refuse, because silently transforming signed attributions
changes what the metric measures. absolute_value is the usual choice for
gradient-based methods.
"""

from __future__ import annotations

import enum
import struct

import numpy as np
from PIL import Image

from .errors import FormatError, NegativeValues, NonFiniteValues
from .grid import BinaryMask, SaliencyMap

SMAP_MAGIC = b"SMAP"
SMAP_VERSION = 1
_HEADER = struct.Struct("<4sBII")  # magic, version, height, width


class NegativePolicy(enum.Enum):
    ERROR = "error"
    CLAMP_TO_ZERO = "clamp_to_zero"
    ABSOLUTE_VALUE = "absolute_value"


def apply_negative_policy(values: np.ndarray, policy: NegativePolicy) -> np.ndarray:
    if not np.any(values < 0):
        return values
    if policy is NegativePolicy.CLAMP_TO_ZERO:
        return np.maximum(values, 0.0)
    if policy is NegativePolicy.ABSOLUTE_VALUE:
        return np.abs(values)
    raise NegativeValues(
        "saliency file contains negative values; rerun with an explicit "
        "negative-value policy (clamp_to_zero or absolute_value)"
    )


def write_saliency(map: SaliencyMap, path) -> None:
    """Write an SMAP v1 file. Payload is float32, so values beyond float32
    range are refused rather than silently saturated."""
    with np.errstate(over="ignore"):
        payload = map.values.astype("<f4")
    if not np.all(np.isfinite(payload)):
        raise NonFiniteValues("values exceed 32-bit float range")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SMAP_MAGIC, SMAP_VERSION, map.height, map.width))
        fh.write(payload.tobytes(order="C"))


def _read_smap(data: bytes, path) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated SMAP header")
    magic, version, height, width = _HEADER.unpack_from(data)
    if magic != SMAP_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != SMAP_VERSION:
        raise FormatError(f"{path}: unsupported SMAP version {version}")
    if height < 1 or width < 1:
        raise FormatError(f"{path}: header dims {height}x{width} are not positive")
    expected = height * width * 4
    got = len(data) - _HEADER.size
    if got != expected:
        raise FormatError(f"{path}: payload is {got} bytes, header implies {expected}")
    vals = np.frombuffer(data, dtype="<f4", count=height * width, offset=_HEADER.size)
    return vals.astype(np.float64).reshape(height, width)


def _read_gray_png(path) -> np.ndarray:
    with Image.open(path) as im:
        mode = im.mode
        if mode == "L":
            scale = 255.0
        elif mode in ("I", "I;16", "I;16B", "I;16L"):
            scale = 65535.0
        elif mode == "1":
            im = im.convert("L")
            scale = 255.0
        else:
            raise FormatError(f"{path}: PNG mode {mode!r}; need 8/16-bit grayscale")
        arr = np.asarray(im, dtype=np.float64)
    if arr.ndim != 2:
        raise FormatError(f"{path}: PNG decoded to shape {arr.shape}, not 2-D")
    return arr / scale


def read_saliency(path, policy: NegativePolicy = NegativePolicy.ERROR) -> SaliencyMap:
    """Read an SMAP or grayscale-PNG saliency file.

    The format is sniffed from the leading bytes, not the extension. PNG
    levels map linearly to [0, 1]. NaN or infinite payloads are rejected;
    negative payloads go through `policy`.
    """
    with open(path, "rb") as fh:
        head = fh.read(8)
        if head.startswith(SMAP_MAGIC):
            vals = _read_smap(head + fh.read(), path)
        elif head.startswith(b"\x89PNG"):
            vals = _read_gray_png(path)
        else:
            raise FormatError(f"{path}: neither SMAP nor PNG (leading bytes {head[:4]!r})")
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValues(f"{path}: payload contains NaN or infinite values")
    vals = apply_negative_policy(vals, policy)
    return SaliencyMap(vals)


def write_mask_png(mask: BinaryMask, path) -> None:
    """Write a binary mask as an 8-bit grayscale PNG (foreground = 255)."""
    Image.fromarray(np.where(mask.bits, 255, 0).astype(np.uint8), mode="L").save(path)


def write_gray_png(values: np.ndarray, path) -> None:
    """Write a [0, 1] float array as an 8-bit grayscale PNG (rounded levels)."""
    arr = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    Image.fromarray(np.floor(arr * 255.0 + 0.5).astype(np.uint8), mode="L").save(path)
