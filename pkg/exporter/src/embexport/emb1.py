"""Writer for the EMB1 embedding container.

Layout (little-endian):

    offset  size  field
    0       4     magic, ASCII "EMB1"
    4       4     version, u32, currently 1
    8       4     count N, u32
    12      4     dim D, u32
    16      1     flags, u8 (bit 0: producer claims rows are unit-norm)
    17      4*N*D payload, float32 row-major

Rows are written raw, exactly as the model produced them; the consumer owns
normalization.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .errors import ExportError

MAGIC = b"EMB1"
VERSION = 1
FLAG_UNIT_NORM = 0x01

_HEADER = struct.Struct("<4sIIIB")


def write_emb1(path: str | Path, rows: np.ndarray, unit_norm: bool = False) -> None:
    """Write a (N, D) float array. Atomic: temp file, then rename over path."""
    arr = np.ascontiguousarray(np.asarray(rows, dtype=np.float32))
    if arr.ndim != 2:
        raise ExportError(f"rows must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ExportError("rows contain NaN or Inf")
    path = Path(path)
    flags = FLAG_UNIT_NORM if unit_norm else 0
    header = _HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1], flags)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(header + arr.tobytes())
    os.replace(tmp, path)
