"""Binary field dumps.

Layout, little-endian: ``b"FRF1"``, u32 dim, u32 pts, f64 side, then
``pts**dim`` f64 values in row-major order.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, GridMismatch
from .spectral import Field, Grid

MAGIC = b"FRF1"
_HEADER = struct.Struct("<4sIId")


def dumps_field(u: Field) -> bytes:
    g = u.grid
    head = _HEADER.pack(MAGIC, g.dim, g.pts, float(g.side))
    return head + np.ascontiguousarray(u.values, dtype="<f8").tobytes()


def loads_field(data: bytes) -> Field:
    if len(data) < _HEADER.size:
        raise FormatError(f"dump is {len(data)} bytes, shorter than the {_HEADER.size}-byte header")
    magic, dim, pts, side = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    try:
        grid = Grid(int(dim), float(side), int(pts))
    except ValueError as exc:
        raise FormatError(f"bad grid header: {exc}") from None
    expected = grid.size * 8
    body = data[_HEADER.size:]
    if len(body) != expected:
        raise FormatError(f"payload has {len(body)} bytes, header implies {expected}")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(grid.shape)
    return Field(grid, values)


def save_field(path, u: Field) -> None:
    Path(path).write_bytes(dumps_field(u))


def load_field(path, grid: Grid | None = None) -> Field:
    """Read a dump, optionally checking it against ``grid``.

    Only ``dim`` and ``pts`` must agree: solvers return fields on a dilated
    box, so the stored side length may differ from the configured one.
    """
    u = loads_field(Path(path).read_bytes())
    if grid is not None and (u.grid.dim, u.grid.pts) != (grid.dim, grid.pts):
        raise GridMismatch(
            f"dump has dim={u.grid.dim}, pts={u.grid.pts}; config expects dim={grid.dim}, pts={grid.pts}"
        )
    return u
