"""OBJ meshes and deterministic JSON for sampled surfaces."""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InvalidData
from .grid import DomainGrid, SurfaceGrid


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x)) + ".0"
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits.

    Non-finite floats become null; numpy scalars and arrays are converted.
    Identical input gives identical text.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.floating, float)):
        return _num(obj)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k), indent, _level + 1)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj) + "\n")


def write_obj(surface: SurfaceGrid, path):
    """ASCII OBJ: one vertex and normal per node (row-major, index i * ny + j), two
    triangles per grid cell."""
    nx, ny = surface.grid.nx, surface.grid.ny
    P = surface.points.reshape(-1, 3)
    N = surface.normals.reshape(-1, 3)
    lines = [f"# cmc surface {nx} x {ny}"]
    lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in P]
    lines += [f"vn {x:.17g} {y:.17g} {z:.17g}" for x, y, z in N]
    idx = np.arange(nx * ny).reshape(nx, ny) + 1
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    for p, q, r, s in zip(a, b, c, d):
        lines.append(f"f {p}//{p} {q}//{q} {r}//{r}")
        lines.append(f"f {p}//{p} {r}//{r} {s}//{s}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_obj(path, grid: DomainGrid, metadata=None) -> SurfaceGrid:
    """Read vertices and normals written by :func:`write_obj` back onto ``grid``."""
    verts, norms = [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.startswith("v "):
                verts.append([float(t) for t in line.split()[1:4]])
            elif line.startswith("vn "):
                norms.append([float(t) for t in line.split()[1:4]])
    n = grid.nx * grid.ny
    if len(verts) != n:
        raise InvalidData(f"OBJ has {len(verts)} vertices, grid needs {n}")
    P = np.array(verts).reshape(grid.nx, grid.ny, 3)
    N = np.array(norms).reshape(grid.nx, grid.ny, 3) if len(norms) == n else None
    return SurfaceGrid(grid, P, N, metadata=dict(metadata or {}))
