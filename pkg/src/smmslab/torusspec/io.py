"""Grid fields as a short text header followed by raw little-endian array data."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import InvalidParameterError
from .grid import TorusGrid

MAGIC = "SMMSGRID 1"


def write_grid_field(path, grid: TorusGrid, values: np.ndarray) -> None:
    """Write ``values`` (shape ``grid.shape`` or ``grid.shape + (c,)``) with its grid description."""
    values = np.asarray(values)
    if values.shape[: grid.n] != grid.shape or values.ndim > grid.n + 1:
        raise InvalidParameterError("values do not live on this grid")
    components = 0 if values.ndim == grid.n else values.shape[-1]  # 0 marks a scalar field
    dtype = np.dtype("<c16") if np.iscomplexobj(values) else np.dtype("<f8")
    header = [
        MAGIC,
        f"n {grid.n}",
        f"N {grid.N}",
        "periods " + " ".join(repr(p) for p in grid.periods),
        "phases " + " ".join(repr(p) for p in grid.phases),
        f"components {components}",
        f"dtype {dtype.str}",
        "end",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(values, dtype=dtype).tobytes())


def read_grid_field(path):
    """Inverse of :func:`write_grid_field`; returns ``(grid, values)``."""
    data = Path(path).read_bytes()
    fields = {}
    pos = 0
    first = True
    while True:
        end = data.index(b"\n", pos)
        line = data[pos:end].decode("ascii")
        pos = end + 1
        if first:
            if line != MAGIC:
                raise InvalidParameterError(f"{path}: not a grid field file")
            first = False
            continue
        if line == "end":
            break
        key, _, rest = line.partition(" ")
        fields[key] = rest
    grid = TorusGrid(int(fields["n"]), int(fields["N"]),
                     tuple(float(p) for p in fields["periods"].split()),
                     tuple(float(p) for p in fields["phases"].split()))
    components = int(fields["components"])
    arr = np.frombuffer(data[pos:], dtype=np.dtype(fields["dtype"]))
    shape = grid.shape if components == 0 else grid.shape + (components,)
    if arr.size != int(np.prod(shape)):
        raise InvalidParameterError(f"{path}: payload size does not match header")
    return grid, arr.reshape(shape).copy()
