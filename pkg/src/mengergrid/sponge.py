"""Triadic arithmetic and the level-k approximation of Menger's universal curve.

A level-k cell is addressed by k digit triples ``(dx, dy, dz)``; triple ``i``
picks the subcube at subdivision depth ``i + 1``. A cell is *kept* when no
triple of its address has more than one digit equal to 1, which yields the
familiar 20-subcube recursion of the Menger sponge.
"""

from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapacityError, DomainError

__all__ = [
    "DEFAULT_CELL_BUDGET",
    "KEPT_TRIPLES",
    "TriadicDigits",
    "SpongeCell",
    "SpongeSkeleton",
    "to_triadic",
    "has_alternative_expansion",
    "is_sponge_member",
    "enumerate_cells",
    "skeleton",
    "cell_center",
]

DEFAULT_CELL_BUDGET = 20**5

# Scaled snapping radius for float input: 3^-(k+2) in coordinate units.
_SNAP = Fraction(1, 9)

KEPT_TRIPLES = tuple(
    t for t in itertools.product(range(3), repeat=3) if sum(d == 1 for d in t) <= 1
)


@dataclass(frozen=True)
class TriadicDigits:
    """A k-digit base-3 expansion of a number in [0, 1].

    ``digits[i]`` is the coefficient of ``3**-(i + 1)``. ``residual`` is the
    represented number minus the finite digit sum; it is zero when ``exact``.
    """

    digits: tuple[int, ...]
    exact: bool
    residual: Fraction = Fraction(0)

    def __post_init__(self):
        if any(d not in (0, 1, 2) for d in self.digits):
            raise DomainError(f"triadic digits must be 0, 1 or 2, got {self.digits}")

    @property
    def k(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> Fraction:
        """The finite digit sum, without the residual."""
        n = 0
        for d in self.digits:
            n = 3 * n + d
        return Fraction(n, 3**self.k)


def _check_level(k, minimum):
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < minimum:
        raise DomainError(f"level/precision must be an integer >= {minimum}, got {k!r}")


def _check_unit(x):
    if not isinstance(x, numbers.Real) or isinstance(x, bool):
        raise DomainError(f"coordinate must be a real number, got {x!r}")
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError(f"coordinate must be finite, got {x!r}")
    if not 0 <= x <= 1:
        raise DomainError(f"coordinate {x!r} lies outside [0, 1]")


def _base3(n: int, k: int) -> tuple[int, ...]:
    out = [0] * k
    for i in range(k - 1, -1, -1):
        n, out[i] = divmod(n, 3)
    return tuple(out)


def to_triadic(x, k: int) -> TriadicDigits:
    """Greedy (canonical) k-digit triadic expansion of ``x``.

    Exact rationals (``int``, ``Fraction``) are expanded exactly. Floats are
    snapped to the nearest k-digit triadic rational when they lie within
    ``3**-(k+2)`` of it, so that points on cube faces classify deterministically.
    The value 1 has no k-digit expansion; it is encoded as all 2s with
    ``exact=False`` and residual ``3**-k``.
    """
    _check_level(k, 1)
    _check_unit(x)
    scale = 3**k
    fx = Fraction(x)
    scaled = fx * scale
    n = math.floor(scaled)
    if isinstance(x, float):
        nearest = round(scaled)
        if abs(scaled - nearest) < _SNAP:
            n = nearest
            fx = Fraction(n, scale)
    if n >= scale:
        return TriadicDigits((2,) * k, exact=False, residual=Fraction(1, scale))
    residual = fx - Fraction(n, scale)
    return TriadicDigits(_base3(n, k), exact=residual == 0, residual=residual)


def has_alternative_expansion(d: TriadicDigits) -> TriadicDigits | None:
    """Return the trailing-2s expansion of an exact nonzero triadic rational.

    ``0.10`` (base 3) becomes ``0.02`` followed implicitly by infinitely many
    2s; the implicit tail is carried as a residual of ``3**-k``.
    """
    if not d.exact:
        return None
    nonzero = [i for i, v in enumerate(d.digits) if v]
    if not nonzero:
        return None
    j = nonzero[-1]
    digits = d.digits[:j] + (d.digits[j] - 1,) + (2,) * (d.k - j - 1)
    return TriadicDigits(digits, exact=False, residual=Fraction(1, 3**d.k))


def _expansions(x, k):
    canon = to_triadic(x, k)
    alt = has_alternative_expansion(canon)
    return (canon,) if alt is None else (canon, alt)


def is_sponge_member(p, k: int) -> bool:
    """True if point ``p`` lies in the level-k approximation of the sponge.

    Each coordinate may use any of its admissible expansions; the point is a
    member when some combination never has two coordinates with digit 1 at
    the same position.
    """
    _check_level(k, 1)
    if len(p) != 3:
        raise DomainError(f"expected a point with 3 coordinates, got {len(p)}")
    options = [_expansions(x, k) for x in p]
    for ex, ey, ez in itertools.product(*options):
        if all(
            (a == 1) + (b == 1) + (c == 1) <= 1
            for a, b, c in zip(ex.digits, ey.digits, ez.digits)
        ):
            return True
    return False


@dataclass(frozen=True)
class SpongeCell:
    """Closed subcube of side ``3**-level`` addressed by digit triples."""

    level: int
    address: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.address) != self.level:
            raise DomainError(
                f"address of length {len(self.address)} does not match level {self.level}"
            )

    @classmethod
    def from_coords(cls, level: int, coords) -> "SpongeCell":
        """Build a cell from integer min-corner coordinates in ``[0, 3**level)``."""
        axes = [_base3(int(c), level) for c in coords]
        return cls(level, tuple(zip(*axes)) if level else ())

    @property
    def coords(self) -> tuple[int, int, int]:
        """Integer min-corner coordinates in units of ``3**-level``."""
        x = y = z = 0
        for dx, dy, dz in self.address:
            x, y, z = 3 * x + dx, 3 * y + dy, 3 * z + dz
        return (x, y, z)

    @property
    def is_kept(self) -> bool:
        return all(
            all(d in (0, 1, 2) for d in t) and sum(d == 1 for d in t) <= 1
            for t in self.address
        )


def cell_center(c: SpongeCell) -> tuple[float, float, float]:
    scale = 2 * 3**c.level
    return tuple((2 * v + 1) / scale for v in c.coords)


def _check_budget(k, budget):
    if 20**k > budget:
        raise CapacityError(
            f"level {k} has {20**k} cells, above the cell budget of {budget}"
        )


def _kept_coords(k: int) -> np.ndarray:
    # Prefix-major order, identical to itertools.product over KEPT_TRIPLES.
    kept = np.array(KEPT_TRIPLES, dtype=np.int64)
    coords = np.zeros((1, 3), dtype=np.int64)
    for _ in range(k):
        coords = (3 * coords[:, None, :] + kept[None, :, :]).reshape(-1, 3)
    return coords


def enumerate_cells(k: int, budget: int = DEFAULT_CELL_BUDGET) -> list[SpongeCell]:
    """All kept level-k cells in lexicographic address order (20**k of them)."""
    _check_level(k, 0)
    _check_budget(k, budget)
    return [SpongeCell(k, addr) for addr in itertools.product(KEPT_TRIPLES, repeat=k)]


@dataclass(frozen=True, eq=False)
class SpongeSkeleton:
    """Face-adjacency graph over the kept cells of one level.

    ``edges`` holds unordered index pairs ``(i, j)`` with ``i < j``, sorted.
    """

    level: int
    cells: tuple[SpongeCell, ...]
    coords: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.cells)

    @cached_property
    def adjacency(self) -> frozenset[tuple[int, int]]:
        return frozenset(map(tuple, self.edges.tolist()))

    @cached_property
    def neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        nbrs = [[] for _ in self.cells]
        for i, j in self.edges.tolist():
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(n)) for n in nbrs)

    @cached_property
    def _index(self) -> dict[SpongeCell, int]:
        return {c: i for i, c in enumerate(self.cells)}

    def index_of(self, cell: SpongeCell) -> int:
        try:
            return self._index[cell]
        except KeyError:
            raise DomainError(f"{cell} is not a kept cell of level {self.level}") from None

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.neighbor_lists[i]

    def degree(self, i: int) -> int:
        return len(self.neighbor_lists[i])

    def is_connected(self) -> bool:
        n = len(self.cells)
        if n <= 1:
            return True
        e = self.edges
        a = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
        ncomp, _ = connected_components(a, directed=False)
        return ncomp == 1


def skeleton(k: int, budget: int = DEFAULT_CELL_BUDGET) -> SpongeSkeleton:
    """Level-k skeleton graph; cached, so repeated calls share one object."""
    _check_level(k, 0)
    _check_budget(k, budget)
    return _skeleton(k)


@lru_cache(maxsize=8)
def _skeleton(k: int) -> SpongeSkeleton:
    cells = tuple(enumerate_cells(k, budget=20**k))
    coords = _kept_coords(k)
    side = 3**k
    lookup = np.full(side**3, -1, dtype=np.int64)
    lin = (coords[:, 0] * side + coords[:, 1]) * side + coords[:, 2]
    lookup[lin] = np.arange(len(coords))
    pairs = []
    for axis in range(3):
        nxt = coords.copy()
        nxt[:, axis] += 1
        ok = nxt[:, axis] < side
        src = np.nonzero(ok)[0]
        nl = (nxt[ok, 0] * side + nxt[ok, 1]) * side + nxt[ok, 2]
        dst = lookup[nl]
        hit = dst >= 0
        pairs.append(np.stack([src[hit], dst[hit]], axis=1))
    edges = np.concatenate(pairs) if pairs else np.zeros((0, 2), dtype=np.int64)
    edges = np.sort(edges, axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    coords.setflags(write=False)
    edges.setflags(write=False)
    return SpongeSkeleton(level=k, cells=cells, coords=coords, edges=edges)
