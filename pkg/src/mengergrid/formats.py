"""File formats: grid/embedding JSON, dataset CSV, edge lists, OBJ and PLY.

Floats are written with ``repr``, the shortest string that reads back to the
same double, so every format here round-trips exactly.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .embed import Embedding, GridGeometry
from .errors import ValidationError
from .grid import NeuronGrid, from_edge_list
from .sponge import SpongeCell, SpongeSkeleton, cell_center
from .training import Dataset

__all__ = [
    "write_files",
    "grid_to_json",
    "grid_from_json",
    "load_grid",
    "parse_edge_list",
    "format_edge_list",
    "read_dataset_csv",
    "format_csv",
    "embedding_to_json",
    "embedding_from_json",
    "load_embedding",
    "skeleton_to_json",
    "sponge_obj",
    "polyline_obj",
    "geometry_obj",
    "points_ply",
    "metrics_to_json",
]


def _dumps(obj) -> str:
    return json.dumps(obj) + "\n"


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_files(files: dict) -> list[Path]:
    """Write ``{path: text}`` atomically: all files are staged first, then renamed.

    If staging fails nothing is left behind under the target names.
    """
    staged = []
    for path in files:
        if Path(path).is_dir():
            raise IsADirectoryError(f"{path}: output path is a directory")
    try:
        for path, text in files.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for n, (tmp, path) in enumerate(staged):
        try:
            os.replace(tmp, path)
        except OSError:
            for rest, _ in staged[n:]:
                os.unlink(rest)
            raise
    return [p for _, p in staged]


# -- grids ------------------------------------------------------------------

def grid_to_json(g: NeuronGrid) -> str:
    w = g.weights
    nodes = [[i, [] if w is None else w[i].tolist()] for i in range(g.n_nodes)]
    return _dumps({"dim": g.dim, "nodes": nodes, "edges": [list(e) for e in g.edges]})


def grid_from_json(text: str, source: str = "<grid>") -> NeuronGrid:
    try:
        return _grid_from_json(text, source)
    except (TypeError, IndexError, KeyError) as exc:
        raise ValidationError(f"{source}: malformed grid: {exc}") from None


def _grid_from_json(text, source):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict) or set(obj) != {"dim", "nodes", "edges"}:
        raise ValidationError(f"{source}: expected keys dim, nodes, edges")
    nodes = obj["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(n, list) and len(n) == 2 for n in nodes):
        raise ValidationError(f"{source}: nodes must be a list of [id, weights] pairs")
    ids = [n[0] for n in nodes]
    if ids != list(range(len(nodes))):
        raise ValidationError(f"{source}: node ids must be 0..{len(nodes) - 1} in order")
    try:
        g = from_edge_list([tuple(e) for e in obj["edges"]], n_nodes=len(nodes))
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None
    dim = obj["dim"]
    if dim is None:
        if any(n[1] for n in nodes):
            raise ValidationError(f"{source}: dim is null but nodes carry weights")
        return g
    w = [n[1] for n in nodes]
    if any(len(row) != dim for row in w):
        raise ValidationError(f"{source}: every weight vector must have length {dim}")
    try:
        return g.with_weights(np.array(w, dtype=np.float64).reshape(len(nodes), dim))
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None


def load_grid(path) -> NeuronGrid:
    path = Path(path)
    return grid_from_json(path.read_text(), str(path))


def parse_edge_list(text: str, source: str = "<edges>") -> NeuronGrid:
    """Edge-list text: one ``a b`` pair per line; ``#`` starts a comment."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ValidationError(f"{source}:{lineno}: expected two node ids, got {line!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    try:
        return from_edge_list(pairs)
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None


def format_edge_list(g: NeuronGrid) -> str:
    return "".join(f"{a} {b}\n" for a, b in g.edges)


# -- datasets ---------------------------------------------------------------

def read_dataset_csv(path) -> Dataset:
    """Headerless CSV of decimal floats, one sample per row."""
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), 1):
            if not rec or all(not f.strip() for f in rec):
                continue
            try:
                row = [float(f) for f in rec]
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: not a row of numbers: {','.join(rec)!r}") from None
            if not all(math.isfinite(v) for v in row):
                raise ValidationError(f"{path}:{lineno}: non-finite value")
            if rows and len(row) != len(rows[0]):
                raise ValidationError(
                    f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ValidationError(f"{path}: no samples")
    return Dataset(np.array(rows))


def format_csv(rows) -> str:
    return "".join(",".join(_num(v) for v in row) + "\n" for row in rows)


# -- embeddings -------------------------------------------------------------

def _addr(c: SpongeCell):
    return [list(t) for t in c.address]


def _cell(level, addr, source):
    try:
        cell = SpongeCell(level, tuple(tuple(int(d) for d in t) for t in addr))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{source}: bad cell address {addr!r}: {exc}") from None
    if any(len(t) != 3 for t in cell.address) or not cell.is_kept:
        raise ValidationError(f"{source}: {addr!r} is not a kept cell address")
    return cell


def embedding_to_json(e: Embedding) -> str:
    return _dumps({
        "level": e.level,
        "node_cells": [[v, _addr(c)] for v, c in sorted(e.node_cells.items())],
        "edge_paths": [[list(k), [_addr(c) for c in p]] for k, p in sorted(e.edge_paths.items())],
    })


def embedding_from_json(text: str, source: str = "<embedding>") -> Embedding:
    try:
        return _embedding_from_json(text, source)
    except (TypeError, IndexError, KeyError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"{source}: malformed embedding: {exc}") from None


def _embedding_from_json(text, source):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict) or set(obj) != {"level", "node_cells", "edge_paths"}:
        raise ValidationError(f"{source}: expected keys level, node_cells, edge_paths")
    k = obj["level"]
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ValidationError(f"{source}: level must be a non-negative integer")
    return Embedding(
        level=k,
        node_cells={int(v): _cell(k, a, source) for v, a in obj["node_cells"]},
        edge_paths={(int(e[0]), int(e[1])): tuple(_cell(k, a, source) for a in p)
                    for e, p in obj["edge_paths"]},
    )


def load_embedding(path) -> Embedding:
    path = Path(path)
    return embedding_from_json(path.read_text(), str(path))


# -- sponge -----------------------------------------------------------------

def skeleton_to_json(sk: SpongeSkeleton) -> str:
    return _dumps({
        "level": sk.level,
        "cells": [_addr(c) for c in sk.cells],
        "adjacency": sk.edges.tolist(),
    })


def _cube_corners(c: SpongeCell):
    side = 3**c.level
    x, y, z = c.coords
    return [((x + i) / side, (y + j) / side, (z + k) / side)
            for i in (0, 1) for j in (0, 1) for k in (0, 1)]


# corner index = 4*i + 2*j + k for offsets (i, j, k); outward-facing quads
_CUBE_FACES = ((0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3))


def _vertex(p) -> str:
    return "v " + " ".join(_num(v) for v in p) + "\n"


def sponge_obj(sk: SpongeSkeleton, cubes: bool = False) -> str:
    """OBJ of the skeleton: centre points joined by adjacency lines, or solid cubes."""
    head = f"# level-{sk.level} sponge skeleton, {len(sk.cells)} cells\n"
    if cubes:
        out = [head]
        for n, c in enumerate(sk.cells):
            out.extend(_vertex(p) for p in _cube_corners(c))
            base = 8 * n + 1
            out.extend("f " + " ".join(str(base + i) for i in face) + "\n" for face in _CUBE_FACES)
        return "".join(out)
    pts = [cell_center(c) for c in sk.cells]
    return polyline_obj(pts, [(i, j) for i, j in sk.edges.tolist()], head)


def polyline_obj(points, polylines, header: str = "") -> str:
    """OBJ with ``v`` records for ``points`` and ``l`` records (0-based input indices)."""
    out = [header]
    out.extend(_vertex(p if len(p) == 3 else (*p, 0.0)) for p in points)
    out.extend("l " + " ".join(str(i + 1) for i in line) + "\n" for line in polylines)
    return "".join(out)


def geometry_obj(geom: GridGeometry, level: int | None = None) -> str:
    """Node points first (vertex ``i + 1`` is node ``i``), then link interiors."""
    nodes = sorted(geom.node_points)
    index = {v: i for i, v in enumerate(nodes)}
    points = [geom.node_points[v] for v in nodes]
    lines = []
    for (a, b), poly in sorted(geom.link_polylines.items()):
        idx = [index[a]]
        for p in poly[1:-1]:
            idx.append(len(points))
            points.append(p)
        idx.append(index[b])
        lines.append(idx)
    head = f"# neuron grid embedded at level {level}\n" if level is not None else ""
    return polyline_obj(points, lines, head)


def points_ply(points) -> str:
    pts = list(points)
    head = (
        "ply\nformat ascii 1.0\n"
        f"element vertex {len(pts)}\n"
        "property double x\nproperty double y\nproperty double z\nend_header\n"
    )
    return head + "".join(" ".join(_num(v) for v in p) + "\n" for p in pts)


def metrics_to_json(qe: float, te: float | None, n_samples: int) -> str:
    return _dumps({"qe": qe, "te": te, "n_samples": n_samples})
