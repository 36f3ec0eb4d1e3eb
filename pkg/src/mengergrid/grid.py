"""Neuron grids: finite connected graphs whose nodes carry weight vectors."""

from __future__ import annotations

import numbers
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import CapacityError, DomainError, ValidationError

__all__ = [
    "NeuronGrid",
    "make_chain",
    "make_ring",
    "make_lattice2d",
    "make_lattice3d",
    "make_random_connected",
    "from_edge_list",
    "graph_distance",
    "hop_distances",
    "init_weights",
    "peano_polyline",
    "PEANO_MAX_ORDER",
]

PEANO_MAX_ORDER = 6


def _components(n_nodes, edges):
    nbrs = [[] for _ in range(n_nodes)]
    for a, b in edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    seen = [False] * n_nodes
    comps = []
    for s in range(n_nodes):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True, eq=False)
class NeuronGrid:
    """Connected, undirected, simple graph on nodes ``0..n_nodes-1``.

    ``edges`` is a sorted tuple of ``(a, b)`` pairs with ``a < b``.
    ``weights`` is either None (not yet initialized) or a read-only
    ``(n_nodes, dim)`` float array.
    """

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValidationError("a neuron grid needs at least one node")
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ValidationError(f"self-loop at node {a}")
            if not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
                raise ValidationError(f"edge ({a}, {b}) refers to an unknown node")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        comps = _components(self.n_nodes, self.edges)
        if len(comps) > 1:
            raise ValidationError(
                f"grid is disconnected: {len(comps)} components {comps}"
            )
        if self.weights is not None:
            w = np.array(self.weights, dtype=np.float64)
            if w.ndim != 2 or w.shape[0] != self.n_nodes or w.shape[1] < 1:
                raise ValidationError(
                    f"weights must have shape ({self.n_nodes}, dim), got {w.shape}"
                )
            if not np.all(np.isfinite(w)):
                raise ValidationError("weights must be finite")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int | None:
        return None if self.weights is None else self.weights.shape[1]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        nbrs = [[] for _ in range(self.n_nodes)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return tuple(tuple(sorted(n)) for n in nbrs)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def degree(self, node: int) -> int:
        return len(self.neighbor_lists[node])

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edge_set

    def with_weights(self, weights) -> "NeuronGrid":
        """Return a copy of this grid carrying ``weights``."""
        new = NeuronGrid(self.n_nodes, self.edges, weights)
        # hop distances depend only on the topology
        if "hop_matrix" in self.__dict__:
            new.__dict__["hop_matrix"] = self.__dict__["hop_matrix"]
        return new

    @cached_property
    def hop_matrix(self) -> np.ndarray:
        """All-pairs hop distances as a read-only integer array."""
        n = self.n_nodes
        if self.edges:
            e = np.array(self.edges)
            a = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
            d = shortest_path(a, directed=False, unweighted=True)
        else:
            d = np.zeros((1, 1))
        d = d.astype(np.int64)
        d.setflags(write=False)
        return d


def _check_size(name, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")


def make_chain(m: int) -> NeuronGrid:
    _check_size("m", m)
    return NeuronGrid(m, tuple((i, i + 1) for i in range(m - 1)))


def make_ring(m: int) -> NeuronGrid:
    _check_size("m", m, 3)
    return NeuronGrid(m, tuple((i, i + 1) for i in range(m - 1)) + ((0, m - 1),))


def make_lattice2d(w: int, h: int) -> NeuronGrid:
    """Rectangular 4-neighbour lattice; node ``x + w*y``."""
    _check_size("w", w)
    _check_size("h", h)
    edges = []
    for y in range(h):
        for x in range(w):
            i = x + w * y
            if x + 1 < w:
                edges.append((i, i + 1))
            if y + 1 < h:
                edges.append((i, i + w))
    return NeuronGrid(w * h, tuple(edges))


def make_lattice3d(w: int, h: int, d: int) -> NeuronGrid:
    """Cubic 6-neighbour lattice; node ``x + w*(y + h*z)``."""
    for name, v in (("w", w), ("h", h), ("d", d)):
        _check_size(name, v)
    edges = []
    for z in range(d):
        for y in range(h):
            for x in range(w):
                i = x + w * (y + h * z)
                if x + 1 < w:
                    edges.append((i, i + 1))
                if y + 1 < h:
                    edges.append((i, i + w))
                if z + 1 < d:
                    edges.append((i, i + w * h))
    return NeuronGrid(w * h * d, tuple(edges))


def make_random_connected(n: int, n_edges: int, seed: int,
                          max_degree: int | None = None) -> NeuronGrid:
    """Random connected graph: a random recursive tree plus uniform extra edges.

    With ``max_degree`` set, tree parents and extra edges are drawn only among
    nodes below the cap.
    """
    _check_size("n", n)
    if not n - 1 <= n_edges <= n * (n - 1) // 2:
        raise DomainError(f"{n} nodes admit between {n - 1} and {n * (n - 1) // 2} edges")
    cap = n if max_degree is None else max_degree
    if n > 2 and cap < 2 or n_edges * 2 > n * cap:
        raise DomainError(f"{n_edges} edges do not fit under degree cap {cap}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n).tolist()
    deg = [0] * n
    edges = set()

    def add(a, b):
        edges.add((min(a, b), max(a, b)))
        deg[a] += 1
        deg[b] += 1

    for i in range(1, n):
        open_ = [u for u in perm[:i] if deg[u] < cap]
        add(perm[i], open_[int(rng.integers(0, len(open_)))])
    for _ in range(100 * n_edges):
        if len(edges) >= n_edges:
            break
        a, b = (int(v) for v in rng.choice(n, size=2, replace=False))
        if (min(a, b), max(a, b)) not in edges and deg[a] < cap and deg[b] < cap:
            add(a, b)
    if len(edges) < n_edges:
        raise DomainError(f"could not draw {n_edges} edges under degree cap {cap}")
    return NeuronGrid(n, tuple(edges))


def from_edge_list(pairs, n_nodes: int | None = None) -> NeuronGrid:
    """Validate an edge list into a grid.

    Node ids must be exactly ``0..m-1``; ``n_nodes`` may be given to allow a
    single isolated node (``from_edge_list([], 1)``).
    """
    norm = []
    for p in pairs:
        if len(p) != 2:
            raise ValidationError(f"edge {p!r} is not a pair")
        a, b = p
        for v in (a, b):
            if isinstance(v, bool) or not isinstance(v, numbers.Integral) or v < 0:
                raise ValidationError(f"node id {v!r} is not a non-negative integer")
        norm.append((int(a), int(b)))
    ids = {v for p in norm for v in p}
    if n_nodes is None:
        if not ids:
            raise ValidationError("empty edge list; pass n_nodes=1 for a single node")
        n_nodes = max(ids) + 1
    missing = sorted(set(range(n_nodes)) - ids) if n_nodes > 1 else []
    if missing:
        raise ValidationError(f"node ids must be 0..{n_nodes - 1}; unused ids {missing}")
    return NeuronGrid(n_nodes, tuple(norm))


def graph_distance(g: NeuronGrid, a: int, b: int) -> int:
    """Hop count of a shortest path between nodes ``a`` and ``b``."""
    for v in (a, b):
        if not (isinstance(v, numbers.Integral) and 0 <= v < g.n_nodes):
            raise DomainError(f"unknown node id {v!r}")
    if a == b:
        return 0
    dist = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for v in g.neighbor_lists[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                if v == b:
                    return dist[v]
                queue.append(v)
    raise AssertionError("unreachable: grids are connected")


def hop_distances(g: NeuronGrid) -> np.ndarray:
    return g.hop_matrix


def init_weights(g: NeuronGrid, data, seed: int) -> NeuronGrid:
    """Give each node a copy of a uniformly drawn sample (with replacement)."""
    x = np.asarray(getattr(data, "samples", data), dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DomainError("cannot initialise weights from an empty dataset")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, x.shape[0], size=g.n_nodes)
    return g.with_weights(x[idx])


def _peano_cells(order):
    cells = np.zeros((1, 2), dtype=np.int64)
    for level in range(order):
        s = 3**level
        blocks = []
        # columns bottom-up, top-down, bottom-up
        for i in range(3):
            rows = range(3) if i % 2 == 0 else range(2, -1, -1)
            for j in rows:
                sub = cells.copy()
                if j % 2:
                    sub[:, 0] = s - 1 - sub[:, 0]
                if i % 2:
                    sub[:, 1] = s - 1 - sub[:, 1]
                sub[:, 0] += i * s
                sub[:, 1] += j * s
                blocks.append(sub)
        cells = np.concatenate(blocks)
    return cells


def peano_polyline(order: int, max_order: int = PEANO_MAX_ORDER) -> np.ndarray:
    """Centres of the ``9**order`` subsquares in Peano's serpentine order.

    Returns an ``(9**order, 2)`` array. The curve starts in the subsquare at
    the origin and ends in the one at ``(1, 1)``.
    """
    _check_size("order", order)
    if order > max_order:
        raise CapacityError(
            f"Peano order {order} needs {9**order} points; limit is order {max_order}"
        )
    return (_peano_cells(order) + 0.5) / 3**order
