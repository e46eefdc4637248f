"""Reader/writer for the EMB1 binary embedding format.

Layout (little-endian):

    offset  size  field
    0       4     magic, ASCII "EMB1"
    4       4     version, u32, currently 1
    8       4     count N, u32
    12      4     dim D, u32
    16      1     flags, u8 (bit 0: producer claims rows are unit-norm)
    17      4*N*D payload, float32 row-major

Rows are stored raw, exactly as produced; normalization is a separate
ingestion step. A valid file round-trips byte for byte through
read_embedding_file / write_embedding_file.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadMagic, DimensionMismatch, FileUnreadable, NonFiniteValue, TruncatedFile

MAGIC = b"EMB1"
VERSION = 1
FLAG_UNIT_NORM = 0x01

_HEADER = struct.Struct("<4sIIIB")


@dataclass
class EmbeddingFile:
    """Decoded EMB1 file: raw float32 rows plus header metadata."""

    count: int
    dim: int
    flags: int
    rows: np.ndarray  # (count, dim) float32, raw

    @property
    def claims_unit_norm(self) -> bool:
        return bool(self.flags & FLAG_UNIT_NORM)


def read_embedding_file(path: str | Path) -> EmbeddingFile:
    """Load an EMB1 file, validating header and payload.

    Raises FileUnreadable, BadMagic, TruncatedFile, DimensionMismatch,
    NonFiniteValue.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: {len(data)} bytes is too short for an EMB1 header")
    magic, version, count, dim, flags = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise BadMagic(f"{path}: unsupported version {version}")
    if dim < 1:
        raise DimensionMismatch(f"{path}: dim must be >= 1, got {dim}")
    expected = _HEADER.size + 4 * count * dim
    if len(data) != expected:
        raise TruncatedFile(
            f"{path}: expected {expected} bytes for {count}x{dim} rows, found {len(data)}"
        )
    rows = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    if count and not np.isfinite(rows).all():
        raise NonFiniteValue(f"{path}: payload contains NaN or Inf")
    return EmbeddingFile(count=count, dim=dim, flags=flags, rows=rows)


def write_embedding_file(
    path: str | Path,
    rows: np.ndarray,
    *,
    unit_norm: bool = False,
    flags: int | None = None,
) -> None:
    """Write rows as an EMB1 file.

    Rows are cast to little-endian float32; pass float32 data to keep the
    write bit-exact. `flags` overrides the flag byte wholesale, otherwise
    only the unit-norm bit is set from `unit_norm`.
    """
    rows = np.asarray(rows)
    if rows.ndim != 2:
        raise DimensionMismatch(f"rows must be 2-D, got shape {rows.shape}")
    if rows.shape[1] < 1:
        raise DimensionMismatch("dim must be >= 1")
    if rows.size and not np.isfinite(rows).all():
        raise NonFiniteValue("refusing to write NaN or Inf values")
    payload = np.ascontiguousarray(rows, dtype="<f4")
    flag_byte = flags if flags is not None else (FLAG_UNIT_NORM if unit_norm else 0)
    header = _HEADER.pack(MAGIC, VERSION, rows.shape[0], rows.shape[1], flag_byte)
    tmp = Path(path).with_name(Path(path).name + ".tmp")
    tmp.write_bytes(header + payload.tobytes())
    tmp.replace(path)
