"""Binary saliency map writer.

The container is a 13-byte header (ASCII magic ``SMAP``, one format
version byte, two little-endian uint32 dims, height first) followed by
the map values as little-endian float32, row-major. Values keep their
sign; consumers decide how to treat negative attributions.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SMAP"
VERSION = 1

_HEADER = struct.Struct("<4sBII")


def write_smap(values, path: str | Path) -> None:
    """Serialize a 2d float array to ``path`` in the SMAP container."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"saliency map must be a nonempty 2d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("saliency map contains non-finite values")
    with np.errstate(over="ignore"):
        payload = arr.astype("<f4")
    if not np.all(np.isfinite(payload)):
        raise ValueError("saliency values exceed the 32-bit float range")
    height, width = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, height, width))
        fh.write(payload.tobytes(order="C"))
