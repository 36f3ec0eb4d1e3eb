"""Quantisation and topographic error of trained grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grid import NeuronGrid, init_weights, make_chain, make_lattice2d
from .training import (
    TrainingReport,
    TrainingSchedule,
    as_dataset,
    sq_distance_matrix,
    sq_distances,
    som_train,
)

__all__ = [
    "TopologyMetrics",
    "quantization_error",
    "second_bmu",
    "topographic_error",
    "topology_metrics",
    "folding_demo",
    "run_folding_demo",
    "DEMO_SCHEDULE",
    "DEMO_EPOCHS",
]


@dataclass(frozen=True)
class TopologyMetrics:
    quantization_error: float
    topographic_error: float
    n_samples: int

    def to_dict(self) -> dict:
        return {"qe": self.quantization_error, "te": self.topographic_error,
                "n_samples": self.n_samples}


def _prepare(g: NeuronGrid, data):
    if g.weights is None:
        raise DomainError("grid weights are not initialised")
    x = as_dataset(data).samples
    if x.shape[1] != g.dim:
        raise DomainError(f"dataset dimension {x.shape[1]} != grid dimension {g.dim}")
    return x, g.weights


def _two_best(d2):
    rows = np.arange(d2.shape[0])
    first = np.argmin(d2, axis=1)
    masked = d2.copy()
    masked[rows, first] = np.inf
    return first, np.argmin(masked, axis=1)


def quantization_error(g: NeuronGrid, data) -> float:
    """Mean Euclidean distance from each sample to its BMU weight."""
    x, w = _prepare(g, data)
    d2 = sq_distance_matrix(x, w)
    best = d2[np.arange(len(x)), np.argmin(d2, axis=1)]
    return math.fsum(np.sqrt(best).tolist()) / len(x)


def second_bmu(g: NeuronGrid, x) -> int:
    """Runner-up unit for ``x``; ties go to the lowest id."""
    if g.n_nodes < 2:
        raise DomainError("second BMU needs a grid with at least two nodes")
    if g.weights is None:
        raise DomainError("grid weights are not initialised")
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if v.shape[0] != g.dim:
        raise DomainError(f"vector has dimension {v.shape[0]}, grid expects {g.dim}")
    d2 = sq_distances(g.weights, v)
    d2[np.argmin(d2)] = np.inf
    return int(np.argmin(d2))


def topographic_error(g: NeuronGrid, data) -> float:
    """Fraction of samples whose two best units are not linked in the grid."""
    if g.n_nodes < 2:
        raise DomainError("topographic error needs a grid with at least two nodes")
    x, w = _prepare(g, data)
    first, second = _two_best(sq_distance_matrix(x, w))
    bad = sum(not g.has_edge(a, b) for a, b in zip(first.tolist(), second.tolist()))
    return bad / len(x)


def topology_metrics(g: NeuronGrid, data) -> TopologyMetrics:
    x = as_dataset(data).samples
    return TopologyMetrics(quantization_error(g, x), topographic_error(g, x), len(x))


# Shared by both grids of the folding experiment.
DEMO_UNITS = 64
DEMO_SAMPLES = 2048
DEMO_SCHEDULE = TrainingSchedule(t_max=20_000, eta0=0.5, etaF=0.01, sigma0=8.0, sigmaF=0.5)
DEMO_EPOCHS = 10


def run_folding_demo(seed: int) -> dict[str, tuple[TrainingReport, np.ndarray]]:
    """Train a 64-node chain and an 8x8 lattice on the same uniform 2-D data.

    Returns ``{"chain": (report, data), "lattice": (report, data)}``.
    """
    rng = np.random.default_rng(seed)
    data = rng.random((DEMO_SAMPLES, 2))
    out = {}
    for name, g in (("chain", make_chain(DEMO_UNITS)), ("lattice", make_lattice2d(8, 8))):
        g = init_weights(g, data, seed)
        out[name] = (som_train(g, data, DEMO_SCHEDULE, seed, DEMO_EPOCHS), data)
    return out


def folding_demo(seed: int) -> tuple[float, float]:
    """Topographic errors ``(te_chain, te_lattice)`` of the folding experiment.

    A one-dimensional chain must fold to cover the square, so its two best
    units for a sample are often far apart along the chain; the lattice has
    the dimension of the data and does not need to fold.
    """
    runs = run_folding_demo(seed)
    te = {name: topographic_error(rep.grid, data) for name, (rep, data) in runs.items()}
    return te["chain"], te["lattice"]
