import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mengergrid import (
    DomainError,
    NeuronGrid,
    TrainingSchedule,
    ValidationError,
    bmu,
    init_weights,
    lbg_vq,
    make_chain,
    make_lattice2d,
    make_ring,
    quantization_error,
    som_step,
    som_train,
)
from mengergrid.training import Dataset

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def best_two_partition(x):
    """Exhaustive oracle: the 2-partition of ``x`` with least squared error."""
    n = len(x)
    codes = np.arange(2 ** (n - 1), dtype=np.int64)
    # sample n-1 always sits in cluster 0; skip the empty-cluster mask
    masks = ((codes[:, None] >> np.arange(n - 1)) & 1).astype(bool)
    masks = np.concatenate([masks, np.zeros((len(masks), 1), bool)], axis=1)[1:]
    n1 = masks.sum(axis=1)
    s1 = masks.astype(float) @ x
    s0 = x.sum(axis=0) - s1
    sse = (x * x).sum() - (s1 * s1).sum(1) / n1 - (s0 * s0).sum(1) / (n - n1)
    best = masks[np.argmin(sse)]
    return sorted([tuple(x[best].mean(0)), tuple(x[~best].mean(0))])


# -- LBG ----------------------------------------------------------------------

def test_lbg_single_codeword_is_mean():
    x = np.random.default_rng(0).normal(size=(37, 3))
    cb, qe = lbg_vq(x, 1)
    assert np.allclose(cb[0], x.mean(0), rtol=0, atol=1e-12)
    assert qe == pytest.approx(((x - x.mean(0)) ** 2).sum(1).mean(), rel=1e-12)


def test_lbg_exact_cover():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [5.0, 5.0]])
    cb, qe = lbg_vq(x, 4)
    assert qe == 0.0
    assert sorted(map(tuple, cb.tolist())) == sorted(map(tuple, x.tolist()))


def test_lbg_two_clouds_match_partition_oracle():
    rng = np.random.default_rng(42)
    x = np.concatenate([rng.random((10, 2)), rng.random((10, 2)) + [6.0, 3.0]])
    want = best_two_partition(x)
    for seed in range(5):
        cb, _ = lbg_vq(x, 2, seed=seed)
        got = sorted(map(tuple, cb.tolist()))
        assert np.allclose(got, want, rtol=0, atol=1e-12)


def test_lbg_trace_monotone_and_empty_clusters():
    x = np.array([[0.0]] * 9 + [[1.0]])
    for seed in range(20):
        cb, qe, trace = lbg_vq(x, 2, seed=seed, return_trace=True)
        assert qe == 0.0 and sorted(cb[:, 0].tolist()) == [0.0, 1.0]
        assert all(b <= a for a, b in zip(trace, trace[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 60), st.integers(1, 4), st.integers(1, 8))
def test_lbg_trace_non_increasing(seed, n, dim, m):
    x = np.random.default_rng(seed).normal(size=(n, dim))
    m = min(m, n)
    cb, qe, trace = lbg_vq(x, m, seed=seed, return_trace=True)
    assert cb.shape == (m, dim)
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] == qe


def test_lbg_errors():
    with pytest.raises(DomainError):
        lbg_vq(np.zeros((3, 1)), 4)
    with pytest.raises(DomainError):
        lbg_vq(np.zeros((3, 1)), 0)
    with pytest.raises(ValidationError):
        lbg_vq(np.zeros((0, 2)), 1)


# -- BMU ----------------------------------------------------------------------

def test_bmu_examples():
    g = make_chain(2).with_weights([[0.0], [1.0]])
    assert bmu(g, 0.4) == 0
    assert bmu(g, 0.5) == 0
    lat = make_lattice2d(3, 3)
    w = [[x, y] for y in range(3) for x in range(3)]
    assert bmu(lat.with_weights(w), [0.9, 1.1]) == 4
    with pytest.raises(DomainError):
        bmu(g, [0.0, 1.0])
    with pytest.raises(DomainError):
        bmu(make_chain(2), [0.0])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 2), elements=finite), arrays(np.float64, 2, elements=finite))
def test_bmu_brute_force_and_far_node(w, x):
    g = make_chain(6).with_weights(w)
    d = [math.fsum((a - b) ** 2 for a, b in zip(row, x)) for row in w.tolist()]
    b = bmu(g, x)
    assert d[b] == min(d) or math.isclose(d[b], min(d), rel_tol=1e-12)
    far = np.abs(x) + 1000.0
    g2 = make_chain(7).with_weights(np.vstack([w, far]))
    assert bmu(g2, x) == b


# -- som_step -----------------------------------------------------------------

def test_step_full_rate_tiny_sigma():
    sched = TrainingSchedule(10, eta0=1.0, etaF=1.0, sigma0=1e-3, sigmaF=1e-3)
    g = make_chain(3).with_weights([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    x = [0.3, 0.7]
    out = som_step(g, x, 0, sched)
    assert out.weights[0].tolist() == x
    assert out.weights[1:].tolist() == [[1.0, 1.0], [2.0, 2.0]]
    assert g.weights[0].tolist() == [0.0, 0.0]


def test_step_single_node_formula():
    sched = TrainingSchedule(4, eta0=0.5, etaF=0.1)
    g = make_chain(1).with_weights([[1.0, -2.0]])
    x = np.array([3.0, 4.0])
    t = 2
    eta = 0.5 * (0.1 / 0.5) ** (t / 4)
    out = som_step(g, x, t, sched)
    assert np.allclose(out.weights[0], g.weights[0] + eta * (x - g.weights[0]), rtol=0, atol=1e-15)


def test_step_kernel_ratio_on_chain():
    sched = TrainingSchedule(10, eta0=0.5, etaF=0.5, sigma0=1.0, sigmaF=1.0)
    g = make_chain(3).with_weights([[0.0], [10.0], [20.0]])
    x = -1.0
    out = som_step(g, [x], 0, sched).weights[:, 0]
    f0 = (out[0] - 0.0) / (x - 0.0)
    f1 = (out[1] - 10.0) / (x - 10.0)
    f2 = (out[2] - 20.0) / (x - 20.0)
    assert f0 == pytest.approx(0.5, rel=1e-12)
    assert f1 / f0 == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert f2 / f0 == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_step_cutoff():
    sched = TrainingSchedule(10, eta0=0.5, etaF=0.5, sigma0=1.0, sigmaF=1.0)
    g = make_chain(5).with_weights([[0.0], [1.0], [2.0], [3.0], [4.0]])
    out = som_step(g, [-1.0], 0, sched)
    # hop 4 > 3 sigma
    assert out.weights[4, 0] == 4.0 and out.weights[3, 0] != 3.0


def test_step_errors():
    sched = TrainingSchedule(5)
    g = make_chain(2).with_weights([[0.0], [1.0]])
    with pytest.raises(DomainError):
        som_step(g, [0.0], 5, sched)
    with pytest.raises(DomainError):
        som_step(g, [0.0, 1.0], 0, sched)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (5, 3), elements=finite), arrays(np.float64, 3, elements=finite),
       st.floats(0.01, 1.0), st.floats(0.05, 5.0), st.integers(0, 9))
def test_step_stays_in_bounding_box(w, x, eta, sigma, t):
    sched = TrainingSchedule(10, eta0=eta, etaF=eta, sigma0=sigma, sigmaF=sigma)
    g = make_ring(5).with_weights(w)
    new = som_step(g, x, t, sched).weights
    assert np.all(new >= np.minimum(w, x)) and np.all(new <= np.maximum(w, x))


@pytest.mark.parametrize("kw", [
    dict(t_max=0), dict(t_max=5, eta0=0.1, etaF=0.2), dict(t_max=5, eta0=1.5),
    dict(t_max=5, sigma0=0.1, sigmaF=0.2), dict(t_max=5, sigmaF=0.0),
])
def test_schedule_validation(kw):
    with pytest.raises(ValidationError):
        TrainingSchedule(**kw)


def test_schedule_endpoints():
    s = TrainingSchedule(100, 0.5, 0.01, 4.0, 0.5)
    assert s.eta(0) == 0.5 and s.sigma(0) == 4.0
    assert s.eta(100) == pytest.approx(0.01) and s.sigma(100) == pytest.approx(0.5)


# -- som_train ----------------------------------------------------------------

def test_train_constant_data_converges():
    data = np.tile([0.25, -1.5], (50, 1))
    g = make_lattice2d(3, 3).with_weights(np.random.default_rng(0).normal(size=(9, 2)))
    rep = som_train(g, data, TrainingSchedule(3000), seed=1, epochs=3)
    assert np.abs(rep.grid.weights - [0.25, -1.5]).max() < 1e-6
    assert len(rep.qe_trace) == 3 and rep.steps == 3000


def test_train_is_deterministic():
    data = np.random.default_rng(5).random((200, 2))
    g = init_weights(make_ring(10), data, 3)
    a = som_train(g, data, TrainingSchedule(800), seed=9, epochs=4)
    b = som_train(g, data, TrainingSchedule(800), seed=9, epochs=4)
    assert a.qe_trace == b.qe_trace and np.array_equal(a.grid.weights, b.grid.weights)
    c = som_train(g, data, TrainingSchedule(800), seed=10, epochs=4)
    assert not np.array_equal(a.grid.weights, c.grid.weights)


def test_train_lattice_reduces_qe():
    data = np.random.default_rng(0).random((1024, 2))
    g = init_weights(make_lattice2d(8, 8), data, 0)
    rep = som_train(g, data, TrainingSchedule(5000, sigma0=4.0), seed=0, epochs=5)
    assert rep.qe_trace[-1] < rep.initial_qe
    assert rep.initial_qe == quantization_error(g, data)
    assert rep.qe_trace[-1] == quantization_error(rep.grid, data)


def test_train_errors():
    data = np.zeros((4, 2))
    with pytest.raises(DomainError):
        som_train(make_chain(3), data, TrainingSchedule(10), 0)
    g = make_chain(3).with_weights(np.zeros((3, 1)))
    with pytest.raises(DomainError):
        som_train(g, data, TrainingSchedule(10), 0)
    g = make_chain(3).with_weights(np.zeros((3, 2)))
    with pytest.raises(DomainError):
        som_train(g, data, TrainingSchedule(10), 0, epochs=11)


def test_dataset_validation():
    assert Dataset([1.0, 2.0]).samples.shape == (2, 1)
    with pytest.raises(ValidationError):
        Dataset(np.array([[1.0, np.inf]]))
    with pytest.raises(ValidationError):
        Dataset(np.zeros((0, 3)))


def test_weights_untouched_by_training():
    data = np.random.default_rng(2).random((30, 2))
    g = init_weights(make_chain(5), data, 0)
    before = g.weights.copy()
    som_train(g, data, TrainingSchedule(100), 0)
    assert np.array_equal(g.weights, before)
    assert isinstance(g, NeuronGrid)
