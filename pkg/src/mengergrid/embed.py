"""Embedding neuron grids into the level-k skeleton of the universal curve.

Nodes go to distinct kept cells; every link becomes a path of face-adjacent
cells, and paths share no cells except their endpoint node cells. Replacing
each path by a single link gives back the original grid, so the realised
polyline figure in the unit cube is a copy of the grid (up to subdivision of
links).

The search is a heuristic: breadth-first placement next to already placed
neighbours, shortest-path routing around occupied cells, seeded restarts, and
escalation to finer levels.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError
from .grid import NeuronGrid
from .sponge import KEPT_TRIPLES, SpongeCell, SpongeSkeleton, cell_center, skeleton

__all__ = [
    "Embedding",
    "GridGeometry",
    "embed_grid",
    "validate_embedding",
    "embedding_to_geometry",
    "refine_embedding",
]

DEFAULT_RESTARTS = 8


@dataclass(frozen=True, eq=False)
class Embedding:
    """Placement of grid nodes on sponge cells plus one cell path per link.

    ``edge_paths[(a, b)]`` (with ``a < b``) runs from the cell of ``a`` to the
    cell of ``b``, both included.
    """

    level: int
    node_cells: dict[int, SpongeCell]
    edge_paths: dict[tuple[int, int], tuple[SpongeCell, ...]]

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return (self.level, self.node_cells, self.edge_paths) == (
            other.level, other.node_cells, other.edge_paths)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GridGeometry:
    node_points: dict[int, tuple[float, float, float]]
    link_polylines: dict[tuple[int, int], tuple[tuple[float, float, float], ...]]


class _Failed(Exception):
    def __init__(self, edge, reason):
        super().__init__(reason)
        self.edge = edge
        self.reason = reason


def _bfs_order(g: NeuronGrid, root: int, rng) -> list[int]:
    order, seen = [root], {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        nbrs = list(g.neighbor_lists[u])
        if rng is not None:
            rng.shuffle(nbrs)
        for v in nbrs:
            if v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
    return order


def _junction_ranks(sk: SpongeSkeleton) -> np.ndarray:
    """Rank coordinates of junction cells, -1 rows for all other cells.

    A junction is a cell whose three coordinates avoid the digit 1 in base 3.
    Any two junctions that differ in one coordinate are joined by a straight
    run of kept cells, so junctions form a cubic lattice of side ``2**k``
    inside the skeleton; a junction's rank coordinates are its position in
    that lattice.
    """
    c = sk.coords.copy()
    ok = np.ones(len(c), dtype=bool)
    rank = np.zeros_like(c)
    for i in range(sk.level):
        digit = c % 3
        ok &= ~np.any(digit == 1, axis=1)
        rank += (digit // 2) << i
        c //= 3
    rank[~ok] = -1
    return rank


class _Attempt:
    """One placement-and-routing pass at a fixed level.

    In ``junctions`` mode nodes may only occupy junction cells and candidates
    are scored by how well their lattice distances to already placed nodes
    match hop distances in the grid; otherwise any kept cell may host a node
    and candidates are scored by closeness to the placed neighbours.
    """

    CANDIDATES = 32

    def __init__(self, g: NeuronGrid, sk: SpongeSkeleton, rng, junctions: bool):
        self.g = g
        self.sk = sk
        self.nbrs = sk.neighbor_lists
        self.rng = rng
        self.ranks = _junction_ranks(sk) if junctions else None
        self.occupied: dict[int, tuple] = {}
        self.node_at: dict[int, int] = {}
        self.paths: dict[tuple[int, int], list[int]] = {}
        self.pending = Counter()  # unrouted link count per placed node

    def _allowed(self, cell):
        return self.ranks is None or self.ranks[cell, 0] >= 0

    def _ports(self, cell, node):
        """Neighbour cells through which a link of ``node`` could leave ``cell``."""
        n = 0
        for c in self.nbrs[cell]:
            who = self.occupied.get(c)
            if who is None or (who[0] == "node" and self.g.has_edge(node, who[1])):
                n += 1
        return n

    def _tiebreak(self, cells):
        if self.rng is None:
            return dict.fromkeys(cells, 0.0)
        return dict(zip(cells, self.rng.random(len(cells)).tolist()))

    def _occupy_node(self, node, cell):
        self.occupied[cell] = ("node", node)
        self.node_at[node] = cell
        self.pending[node] = self.g.degree(node)

    def place_root(self, root):
        side = 3**self.sk.level
        off = 2 * self.sk.coords + 1 - side
        d2 = (off * off).sum(axis=1)
        need = self.g.degree(root)
        ok = [int(i) for i in np.lexsort((np.arange(len(d2)), d2))
              if len(self.nbrs[int(i)]) >= need and self._allowed(int(i))][:8]
        if not ok:
            raise _Failed(None, f"no cell with {need} neighbours for node {root}")
        pick = 0 if self.rng is None else int(self.rng.integers(0, len(ok)))
        self._occupy_node(root, ok[pick])

    def _candidates(self, node, anchor):
        """Free cells able to host ``node``, nearest to the anchor first."""
        start = self.node_at[anchor]
        need = self.g.degree(node)
        dist = {start: 0}
        frontier, found = [start], []
        while frontier and len(found) < self.CANDIDATES:
            nxt = []
            for u in frontier:
                for c in self.nbrs[u]:
                    if c in dist or c in self.occupied:
                        continue
                    dist[c] = dist[u] + 1
                    nxt.append(c)
                    if self._allowed(c) and self._ports(c, node) >= need:
                        found.append(c)
            frontier = nxt
        if not found:
            raise _Failed((min(node, anchor), max(node, anchor)),
                          f"no free cell with {need} ports reachable from node {anchor}")
        return found, dist

    def place(self, node):
        placed = [u for u in self.g.neighbor_lists[node] if u in self.node_at]
        anchor = min(placed, key=self._order.__getitem__)
        found, dist = self._candidates(node, anchor)
        tb = self._tiebreak(found)
        if self.ranks is None:
            coords = self.sk.coords
            ref = coords[[self.node_at[u] for u in placed]]

            def score(c):
                return (int(np.abs(coords[c] - ref).sum()), dist[c], tb[c], c)
        else:
            others = list(self.node_at)
            ref = self.ranks[[self.node_at[u] for u in others]]
            hops = self.g.hop_matrix[node, others]

            def score(c):
                lat = np.abs(self.ranks[c] - ref).sum(axis=1)
                return (int(np.abs(lat - hops).sum()), dist[c], tb[c], c)

        self._occupy_node(node, min(found, key=score))

    def _shortest(self, src, dst, avoid):
        prev = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for c in self.nbrs[u]:
                if c in prev:
                    continue
                if c == dst:
                    path = [c, u]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path[::-1]
                if c in self.occupied or c in avoid:
                    continue
                prev[c] = u
                queue.append(c)
        return None

    def route(self, a, b):
        key = (min(a, b), max(a, b))
        src, dst = self.node_at[key[0]], self.node_at[key[1]]
        # first try to keep clear of the ports of nodes with links still to route
        guard = set()
        for node, left in self.pending.items():
            if left and node not in key:
                guard.update(self.nbrs[self.node_at[node]])
        path = self._shortest(src, dst, guard) or self._shortest(src, dst, ())
        if path is None:
            raise _Failed(key, f"no free route for link {key}")
        for c in path[1:-1]:
            self.occupied[c] = ("path", key)
        self.paths[key] = path
        self.pending[a] -= 1
        self.pending[b] -= 1

    def run(self, root) -> Embedding:
        order = _bfs_order(self.g, root, self.rng)
        self._order = {v: i for i, v in enumerate(order)}
        self.place_root(root)
        for v in order[1:]:
            self.place(v)
            placed = [u for u in self.g.neighbor_lists[v] if u in self.node_at]
            for u in sorted(placed, key=self._order.__getitem__):
                self.route(v, u)
        cells = self.sk.cells
        return Embedding(
            level=self.sk.level,
            node_cells={v: cells[self.node_at[v]] for v in range(self.g.n_nodes)},
            edge_paths={e: tuple(cells[c] for c in self.paths[e]) for e in self.g.edges},
        )


def _attempts(g: NeuronGrid, seed: int, k: int, restarts: int):
    """Yield ``(rng, root, junctions)`` for every attempt at level ``k``."""
    root = max(range(g.n_nodes), key=lambda v: (g.degree(v), -v))
    yield None, root, False
    yield None, root, True
    for attempt in range(1, restarts + 1):
        rng = np.random.default_rng([seed, k, attempt])
        yield rng, int(rng.integers(0, g.n_nodes)), attempt % 2 == 1


def embed_grid(g: NeuronGrid, k_start: int = 1, k_max: int = 4, seed: int = 0,
               restarts: int = DEFAULT_RESTARTS) -> Embedding:
    """Embed ``g`` at the first level in ``[k_start, k_max]`` where the search succeeds.

    Each level gets two deterministic attempts (root = a highest-degree
    node at the most central admissible cell; free placement, then junction
    placement) followed by ``restarts`` attempts whose root, neighbour order,
    root cell and tie-breaks come from a generator seeded with
    ``(seed, level, attempt)``.

    Raises CapacityError naming the last failing link and level when every
    attempt fails. That is a failure of the heuristic, not a proof that no
    embedding exists at those levels.
    """
    if k_start < 1 or k_max < k_start:
        raise DomainError(f"need 1 <= k_start <= k_max, got {k_start}, {k_max}")
    if max((g.degree(v) for v in range(g.n_nodes)), default=0) > 6:
        raise CapacityError("a node of degree above 6 cannot occupy a single cube cell")
    failure = None
    for k in range(k_start, k_max + 1):
        if 20**k < g.n_nodes:
            failure = (None, k, f"only {20**k} cells for {g.n_nodes} nodes")
            continue
        sk = skeleton(k)
        for rng, root, junctions in _attempts(g, seed, k, restarts):
            try:
                return _Attempt(g, sk, rng, junctions).run(root)
            except _Failed as exc:
                failure = (exc.edge, k, exc.reason)
    edge, k, reason = failure
    raise CapacityError(
        f"embedding heuristic failed up to level {k_max}: link {edge} at level {k} ({reason})"
    )


def _adjacent(c1: SpongeCell, c2: SpongeCell) -> bool:
    diff = [abs(a - b) for a, b in zip(c1.coords, c2.coords)]
    return sorted(diff) == [0, 0, 1]


def validate_embedding(g: NeuronGrid, e: Embedding) -> list[str]:
    """List every violated embedding invariant; an empty list means valid."""
    out = []
    for v in range(g.n_nodes):
        if v not in e.node_cells:
            out.append(f"node {v} has no cell")
    extra_nodes = sorted(set(e.node_cells) - set(range(g.n_nodes)))
    if extra_nodes:
        out.append(f"cells given for unknown nodes {extra_nodes}")
    cells_used = list(e.node_cells.values()) + [c for p in e.edge_paths.values() for c in p]
    for c in cells_used:
        if c.level != e.level or not c.is_kept:
            out.append(f"cell {c.address} is not a kept cell of level {e.level}")
            break

    owner = {}
    for v, c in sorted(e.node_cells.items()):
        if c in owner:
            out.append(f"injectivity: nodes {owner[c]} and {v} share cell {c.address}")
        else:
            owner[c] = v

    want = set(g.edges)
    have = set(e.edge_paths)
    for edge in sorted(want - have):
        out.append(f"link {edge} has no path")
    for edge in sorted(have - want):
        out.append(f"path given for non-link {edge}")

    interior_owner = {}
    for edge, path in sorted(e.edge_paths.items()):
        a, b = edge
        if len(path) < 2:
            out.append(f"path of {edge} has fewer than two cells")
            continue
        if path[0] != e.node_cells.get(a) or path[-1] != e.node_cells.get(b):
            out.append(f"path of {edge} does not join the cells of nodes {a} and {b}")
        for c1, c2 in zip(path, path[1:]):
            if not _adjacent(c1, c2):
                out.append(f"path of {edge}: {c1.address} and {c2.address} are not face-adjacent")
        if len(set(path)) != len(path):
            out.append(f"path of {edge} revisits a cell")
        for c in path[1:-1]:
            if c in owner:
                out.append(f"disjointness: path of {edge} passes through node {owner[c]}")
            elif c in interior_owner and interior_owner[c] != edge:
                out.append(f"disjointness: paths of {interior_owner[c]} and {edge} share {c.address}")
            else:
                interior_owner[c] = edge
    if out:
        return out
    out.extend(_contraction_violations(g, e, owner))
    return out


def _contraction_violations(g, e, owner):
    """Contract the union of all paths and compare with the grid."""
    link = {}
    for path in e.edge_paths.values():
        for c1, c2 in zip(path, path[1:]):
            link.setdefault(c1, []).append(c2)
            link.setdefault(c2, []).append(c1)
    out = []
    for c, nb in link.items():
        if c not in owner and len(nb) != 2:
            out.append(f"contraction: link cell {c.address} has {len(nb)} path neighbours")
    if out:
        return out
    contracted = Counter()
    for start, v in owner.items():
        for nxt in link.get(start, []):
            prev, cur = start, nxt
            while cur not in owner:
                a, b = link[cur]
                prev, cur = cur, (b if a == prev else a)
            contracted[(min(v, owner[cur]), max(v, owner[cur]))] += 1
    # every link was walked once from each end
    recovered = Counter({k: n // 2 for k, n in contracted.items()})
    if any(n % 2 for n in contracted.values()) or set(recovered.elements()) != set(g.edges) \
            or sum(recovered.values()) != g.n_edges:
        out.append("contraction: contracted graph differs from the grid")
    deg = Counter()
    for (a, b), n in recovered.items():
        deg[a] += n
        deg[b] += n
    if sorted(deg[v] for v in range(g.n_nodes)) != sorted(g.degree(v) for v in range(g.n_nodes)):
        out.append("contraction: degree sequence differs from the grid")
    return out


def embedding_to_geometry(e: Embedding) -> GridGeometry:
    return GridGeometry(
        node_points={v: cell_center(c) for v, c in sorted(e.node_cells.items())},
        link_polylines={k: tuple(cell_center(c) for c in p) for k, p in sorted(e.edge_paths.items())},
    )


def refine_embedding(e: Embedding, prefix=(0, 0, 0)) -> Embedding:
    """Move an embedding one level down into the subcube addressed by ``prefix``.

    The sponge inside any kept level-1 subcube is a scaled copy of the whole,
    so adjacency and disjointness carry over unchanged.
    """
    prefix = tuple(prefix)
    if prefix not in KEPT_TRIPLES:
        raise DomainError(f"prefix {prefix} is not a kept digit triple")

    def lift(c):
        return SpongeCell(c.level + 1, (prefix,) + c.address)

    return Embedding(
        level=e.level + 1,
        node_cells={v: lift(c) for v, c in e.node_cells.items()},
        edge_paths={k: tuple(lift(c) for c in p) for k, p in e.edge_paths.items()},
    )
