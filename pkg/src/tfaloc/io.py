"""
File formats.

TFAG grid files: ``b"TFAGRID1"``, little-endian ``u32 d``, ``u32 N``,
``f64 dx``, then the values as interleaved ``f64`` (re, im) in row-major
order. The number of values (N^d or N^2d) tells functions from fields.

Operator files: same layout with magic ``b"TFAOPM01"`` and the N^d x N^d
kernel entries.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .grid import GridSpec, SampledField, SampledFunction
from .quant import OperatorMatrix

GRID_MAGIC = b"TFAGRID1"
OP_MAGIC = b"TFAOPM01"
_HEADER = struct.Struct("<IId")


def _pack(magic: bytes, grid: GridSpec, values: np.ndarray) -> bytes:
    v = np.ascontiguousarray(values, dtype="<c16")
    return magic + _HEADER.pack(grid.d, grid.N, grid.dx) + v.view("<f8").tobytes()


def _unpack(data: bytes, magic: bytes):
    if data[:8] != magic:
        raise ValueError(f"bad magic {data[:8]!r}, expected {magic!r}")
    d, N, dx = _HEADER.unpack_from(data, 8)
    raw = np.frombuffer(data, dtype="<f8", offset=8 + _HEADER.size)
    if raw.size % 2:
        raise ValueError("truncated payload")
    return GridSpec(d, N, dx), raw.view("<c16").astype(complex)


def dumps_sampled(obj: SampledFunction | SampledField) -> bytes:
    return _pack(GRID_MAGIC, obj.grid, obj.values)


def loads_sampled(data: bytes):
    grid, vals = _unpack(data, GRID_MAGIC)
    if vals.size == grid.N**grid.d:
        return SampledFunction(grid, vals)
    if vals.size == grid.N ** (2 * grid.d):
        return SampledField(grid, vals)
    raise ValueError(f"payload of {vals.size} values does not match the grid")


def dumps_operator(op: OperatorMatrix) -> bytes:
    return _pack(OP_MAGIC, op.grid, op.entries)


def loads_operator(data: bytes) -> OperatorMatrix:
    grid, vals = _unpack(data, OP_MAGIC)
    n = grid.N**grid.d
    if vals.size != n * n:
        raise ValueError("operator payload has the wrong size")
    return OperatorMatrix(grid, vals.reshape(n, n))


def write_sampled(path, obj) -> None:
    Path(path).write_bytes(dumps_sampled(obj))


def read_sampled(path):
    return loads_sampled(Path(path).read_bytes())


def write_operator(path, op: OperatorMatrix) -> None:
    Path(path).write_bytes(dumps_operator(op))


def read_operator(path) -> OperatorMatrix:
    return loads_operator(Path(path).read_bytes())


def write_csv(stream, obj) -> None:
    """One row per grid point: coordinates, then re and im."""
    grid = obj.grid
    ax = grid.axis()
    n = obj.ndim
    w = csv.writer(stream, lineterminator="\n")
    w.writerow([f"w{k}" for k in range(n)] + ["re", "im"])
    for idx in np.ndindex(*obj.values.shape):
        v = obj.values[idx]
        w.writerow([repr(float(ax[i])) for i in idx] + [repr(float(v.real)), repr(float(v.imag))])


def read_csv(stream, grid: GridSpec):
    rows = list(csv.reader(stream))[1:]
    vals = np.array([complex(float(r[-2]), float(r[-1])) for r in rows])
    if vals.size == grid.N**grid.d:
        return SampledFunction(grid, vals)
    return SampledField(grid, vals)


__all__ = [
    "dumps_sampled",
    "loads_sampled",
    "dumps_operator",
    "loads_operator",
    "write_sampled",
    "read_sampled",
    "write_operator",
    "read_operator",
    "write_csv",
    "read_csv",
]
