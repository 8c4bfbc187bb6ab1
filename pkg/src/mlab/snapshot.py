"""Binary field snapshot container.

Layout, little-endian throughout:

* 16-byte magic: ASCII ``MLABFLD1`` padded with NUL bytes,
* u32 dimension ``d``, u32 points per axis ``n``, f64 ``period``,
* one flag byte, ``0`` meaning complex128 interleaved (re, im),
* ``n^d`` sample pairs in row-major order.

The same framing (with ``d = 1`` and ``n`` the flat length) carries the
factor tables of serialized separable expansions.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .grid import Field, GridSpec

__all__ = ["MAGIC", "write_field", "read_field", "write_array_record", "read_array_record"]

MAGIC = b"MLABFLD1".ljust(16, b"\x00")
_HEADER = struct.Struct("<IId")
_FLAG_COMPLEX128 = 0


def _write_record(fh: BinaryIO, d: int, n: int, period: float, data: np.ndarray) -> None:
    fh.write(MAGIC)
    fh.write(_HEADER.pack(d, n, period))
    fh.write(bytes([_FLAG_COMPLEX128]))
    flat = np.ascontiguousarray(data.reshape(-1), dtype=np.complex128)
    if flat.size != n**d:
        raise ValueError(f"data length {flat.size} != n^d = {n**d}")
    pairs = np.empty(2 * flat.size, dtype="<f8")
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    fh.write(pairs.tobytes())


def _read_record(fh: BinaryIO) -> tuple[int, int, float, np.ndarray]:
    magic = fh.read(16)
    if magic != MAGIC:
        raise ValueError("bad magic: not a field snapshot")
    d, n, period = _HEADER.unpack(fh.read(_HEADER.size))
    flag = fh.read(1)
    if len(flag) != 1 or flag[0] != _FLAG_COMPLEX128:
        raise ValueError(f"unsupported payload flag {flag!r}")
    count = n**d
    raw = fh.read(16 * count)
    if len(raw) != 16 * count:
        raise ValueError("truncated snapshot payload")
    pairs = np.frombuffer(raw, dtype="<f8")
    data = pairs[0::2] + 1j * pairs[1::2]
    return d, n, period, data


def write_field(path: str | Path, f: Field) -> None:
    """Write one field snapshot to ``path``."""
    with open(path, "wb") as fh:
        _write_record(fh, f.grid.d, f.grid.n, f.grid.period, f.samples)


def read_field(path: str | Path) -> Field:
    """Read one field snapshot; grid validity is re-checked on load."""
    with open(path, "rb") as fh:
        d, n, period, data = _read_record(fh)
    grid = GridSpec(d, n, period)
    return Field(grid, data.reshape(grid.shape))


def write_array_record(fh: BinaryIO, data: np.ndarray) -> None:
    """Frame a flat complex array as a ``d = 1`` record inside ``fh``."""
    flat = np.asarray(data, dtype=np.complex128).reshape(-1)
    _write_record(fh, 1, flat.size, 0.0, flat)


def read_array_record(fh: BinaryIO) -> np.ndarray:
    d, n, _, data = _read_record(fh)
    if d != 1:
        raise ValueError("expected a flat array record")
    return data
