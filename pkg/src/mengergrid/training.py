"""Vector quantisation: LBG codebooks and online Kohonen maps on arbitrary grids."""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .grid import NeuronGrid

__all__ = [
    "Dataset",
    "as_dataset",
    "TrainingSchedule",
    "TrainingReport",
    "sq_distances",
    "sq_distance_matrix",
    "lbg_vq",
    "bmu",
    "som_step",
    "som_train",
    "KERNEL_CUTOFF",
]

# Neighbourhood updates are skipped beyond this many sigmas.
KERNEL_CUTOFF = 3.0


@dataclass(frozen=True, eq=False)
class Dataset:
    """Nonempty ``(n, dim)`` array of finite samples."""

    samples: np.ndarray

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
            raise ValidationError(f"dataset must be a nonempty 2-D array, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValidationError("dataset contains non-finite values")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def __len__(self):
        return self.samples.shape[0]


def as_dataset(data) -> Dataset:
    return data if isinstance(data, Dataset) else Dataset(data)


# The data-space metric. Every winner search in the package goes through these
# two functions; swap them to change the metric. Coordinates are accumulated
# in index order so results do not depend on numpy's reduction strategy.
def sq_distances(weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from each row of ``weights`` to ``x``."""
    acc = np.zeros(weights.shape[0])
    for j in range(weights.shape[1]):
        diff = weights[:, j] - x[j]
        acc += diff * diff
    return acc


def sq_distance_matrix(samples: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``(n_samples, n_weights)`` squared Euclidean distances."""
    acc = np.zeros((samples.shape[0], weights.shape[0]))
    for j in range(samples.shape[1]):
        diff = samples[:, j, None] - weights[None, :, j]
        acc += diff * diff
    return acc


@dataclass(frozen=True)
class TrainingSchedule:
    """Exponentially decaying learning rate and neighbourhood radius.

    At step ``t`` the rate is ``eta0 * (etaF/eta0) ** (t/t_max)`` and the
    radius (in hops) follows the same law between ``sigma0`` and ``sigmaF``.
    """

    t_max: int
    eta0: float = 0.5
    etaF: float = 0.01
    sigma0: float = 3.0
    sigmaF: float = 0.5

    def __post_init__(self):
        if isinstance(self.t_max, bool) or not isinstance(self.t_max, numbers.Integral) or self.t_max < 1:
            raise ValidationError(f"t_max must be an integer >= 1, got {self.t_max!r}")
        if not 0 < self.etaF <= self.eta0 <= 1:
            raise ValidationError(
                f"need 0 < etaF <= eta0 <= 1, got eta0={self.eta0}, etaF={self.etaF}"
            )
        if not 0 < self.sigmaF <= self.sigma0 or not math.isfinite(self.sigma0):
            raise ValidationError(
                f"need 0 < sigmaF <= sigma0, got sigma0={self.sigma0}, sigmaF={self.sigmaF}"
            )

    def eta(self, t: int) -> float:
        return self.eta0 * (self.etaF / self.eta0) ** (t / self.t_max)

    def sigma(self, t: int) -> float:
        return self.sigma0 * (self.sigmaF / self.sigma0) ** (t / self.t_max)


@dataclass(frozen=True, eq=False)
class TrainingReport:
    qe_trace: tuple[float, ...]
    grid: NeuronGrid
    steps: int
    seed: int
    initial_qe: float


def _as_vector(x, dim):
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if v.shape[0] != dim:
        raise DomainError(f"vector has dimension {v.shape[0]}, grid expects {dim}")
    return v


def _require_weights(g: NeuronGrid):
    if g.weights is None:
        raise DomainError("grid weights are not initialised; call init_weights first")
    return g.weights


def bmu(g: NeuronGrid, x) -> int:
    """Best-matching unit: node with the nearest weight, lowest id on ties."""
    w = _require_weights(g)
    v = _as_vector(x, w.shape[1])
    return int(np.argmin(sq_distances(w, v)))


def _update(w: np.ndarray, hop_row: np.ndarray, x: np.ndarray, eta: float, sigma: float):
    """Apply one Kohonen update to ``w`` in place."""
    b = int(np.argmin(sq_distances(w, x)))
    d = hop_row[b]
    near = np.nonzero(d <= KERNEL_CUTOFF * sigma)[0]
    dn = d[near].astype(np.float64)
    f = eta * np.exp(-(dn * dn) / (2.0 * sigma * sigma))
    old = w[near]
    new = old + f[:, None] * (x - old)
    new[f == 1.0] = x
    # rounding must not push a weight outside the segment [old, x]
    np.clip(new, np.minimum(old, x), np.maximum(old, x), out=new)
    w[near] = new
    return b


def som_step(g: NeuronGrid, x, t: int, schedule: TrainingSchedule) -> NeuronGrid:
    """One online SOM update at step ``t``; returns a new grid."""
    w = _require_weights(g)
    v = _as_vector(x, w.shape[1])
    if not 0 <= t < schedule.t_max:
        raise DomainError(f"step t={t} outside [0, {schedule.t_max})")
    out = w.copy()
    _update(out, g.hop_matrix, v, schedule.eta(t), schedule.sigma(t))
    return g.with_weights(out)


def _mean_bmu_distance(samples, weights):
    d2 = sq_distance_matrix(samples, weights)
    best = d2[np.arange(len(samples)), np.argmin(d2, axis=1)]
    return math.fsum(np.sqrt(best).tolist()) / len(samples)


def som_train(
    g: NeuronGrid, data, schedule: TrainingSchedule, seed: int, epochs: int = 1
) -> TrainingReport:
    """Run ``schedule.t_max`` online steps on uniformly drawn samples.

    Steps are split into ``epochs`` contiguous blocks; the quantisation error
    (mean distance to the BMU) is recorded after each block.
    """
    w0 = _require_weights(g)
    ds = as_dataset(data)
    if ds.dim != w0.shape[1]:
        raise DomainError(f"dataset dimension {ds.dim} != grid dimension {w0.shape[1]}")
    if isinstance(epochs, bool) or not isinstance(epochs, numbers.Integral) or not 1 <= epochs <= schedule.t_max:
        raise DomainError(f"epochs must be an integer in [1, t_max], got {epochs!r}")
    x = ds.samples
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, len(x), size=schedule.t_max)
    hops = g.hop_matrix
    w = w0.copy()
    initial_qe = _mean_bmu_distance(x, w)
    trace = []
    for e in range(epochs):
        lo = e * schedule.t_max // epochs
        hi = (e + 1) * schedule.t_max // epochs
        for t in range(lo, hi):
            _update(w, hops, x[draws[t]], schedule.eta(t), schedule.sigma(t))
        trace.append(_mean_bmu_distance(x, w))
    return TrainingReport(
        qe_trace=tuple(trace),
        grid=g.with_weights(w),
        steps=schedule.t_max,
        seed=seed,
        initial_qe=initial_qe,
    )


def _distortion(d2min):
    return math.fsum(d2min.tolist()) / len(d2min)


def lbg_vq(data, m: int, max_iters: int = 100, tol: float = 1e-9, seed: int = 0,
           return_trace: bool = False):
    """Lloyd/LBG codebook optimisation.

    Returns ``(codebook, qe)`` where ``qe`` is the mean squared distance of
    samples to their nearest codeword; with ``return_trace=True`` a third item
    lists ``qe`` for the seed codebook and every accepted iteration.

    Iteration stops when the relative improvement drops below ``tol``, after
    ``max_iters``, or if rounding would make the error grow. A codeword that
    loses all its samples is moved onto the sample farthest from its own
    codeword, which keeps ``m`` fixed.
    """
    x = as_dataset(data).samples
    n = len(x)
    if isinstance(m, bool) or not isinstance(m, numbers.Integral) or not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= {n} codewords, got {m!r}")
    rng = np.random.default_rng(seed)
    codebook = x[rng.choice(n, size=m, replace=False)].copy()

    d2 = sq_distance_matrix(x, codebook)
    assign = np.argmin(d2, axis=1)
    qe = _distortion(d2[np.arange(n), assign])
    trace = [qe]
    for _ in range(max_iters):
        if qe == 0.0:
            break
        new = codebook.copy()
        for c in range(m):
            members = x[assign == c]
            if len(members):
                new[c] = members.mean(axis=0)
        d2 = sq_distance_matrix(x, new)
        new_assign = np.argmin(d2, axis=1)
        counts = np.bincount(new_assign, minlength=m)
        for c in np.nonzero(counts == 0)[0]:
            own = d2[np.arange(n), new_assign]
            far = int(np.argmax(own))
            new[c] = x[far]
            d2 = sq_distance_matrix(x, new)
            new_assign = np.argmin(d2, axis=1)
        new_qe = _distortion(d2[np.arange(n), new_assign])
        if new_qe > qe:
            break
        improvement = qe - new_qe
        codebook, assign, qe = new, new_assign, new_qe
        trace.append(qe)
        if improvement <= tol * trace[-2]:
            break
    if return_trace:
        return codebook, qe, trace
    return codebook, qe
