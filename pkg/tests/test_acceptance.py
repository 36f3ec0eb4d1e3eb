"""The ten acceptance criteria, each at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import itertools
import json
import math
import time
from fractions import Fraction as F

import numpy as np

from grid_suites import factory_suite
from mengergrid import (
    embed_grid,
    embedding_to_geometry,
    enumerate_cells,
    folding_demo,
    is_sponge_member,
    lbg_vq,
    make_random_connected,
    make_ring,
    peano_polyline,
    quantization_error,
    skeleton,
    topographic_error,
    validate_embedding,
)
from mengergrid.cli import main


def digit_value(digits):
    return sum(F(d, 3 ** (i + 1)) for i, d in enumerate(digits))


def test_01_sponge_counts(criterion):
    t0 = time.perf_counter()
    counts = [len(enumerate_cells(k)) for k in range(4)]
    dt = time.perf_counter() - t0
    ok = counts == [20**k for k in range(4)] and dt < 1.0
    assert criterion(1, "sponge counts 20^k, k=0..3", ok, f"{counts} in {dt:.2f}s")


def test_02_membership_matches_expansion_oracle(criterion):
    k = 3
    strings = list(itertools.product(range(3), repeat=k))
    side = F(1, 3**k)
    # every k-digit string whose closed interval holds the coordinate
    options = [[d for d in strings if digit_value(d) <= F(i, 27) <= digit_value(d) + side]
               for i in range(28)]

    def oracle(i, j, m):
        return any(all(sum(v == 1 for v in t) <= 1 for t in zip(a, b, c))
                   for a, b, c in itertools.product(options[i], options[j], options[m]))

    expected = {p: oracle(*p) for p in itertools.product(range(28), repeat=3)}
    t0 = time.perf_counter()
    got = {p: is_sponge_member((p[0] / 27, p[1] / 27, p[2] / 27), k) for p in expected}
    dt = time.perf_counter() - t0
    mismatches = [p for p in expected if got[p] != expected[p]]
    members = sum(expected.values())
    ok = not mismatches and dt < 10.0
    assert criterion(2, "membership equals expansion-choice oracle on i/27 grid", ok,
                     f"{len(expected)} points, {members} members, {len(mismatches)} mismatches, {dt:.2f}s")


def test_03_self_similarity(criterion):
    level1 = {c.address for c in enumerate_cells(1)}
    children = {}
    prefix_ok = True
    for c in enumerate_cells(2):
        prefix_ok &= c.address[:1] in level1
        children.setdefault(c.address[:1], []).append(c)
    ok = prefix_ok and set(children) == level1 and all(len(v) == 20 for v in children.values())
    assert criterion(3, "level-2 prefixes are level-1 cells, 20 children each", ok)


def test_04_peano_coverage(criterion):
    ok = True
    for p in (1, 2, 3):
        pts = peano_polyline(p)
        n = 3**p
        cells = np.rint(pts * n - 0.5).astype(int)
        ok &= len({tuple(c) for c in cells.tolist()}) == 9**p == len(pts)
        ok &= bool(np.array_equal((cells + 0.5) / n, pts))
        steps = np.abs(np.diff(cells, axis=0))
        ok &= bool(np.all(steps.max(axis=1) == 1) and np.all(steps.sum(axis=1) == 1))
    assert criterion(4, "Peano p=1..3 visits all 9^p centres once, L-inf steps 3^-p", ok)


def test_05_lbg_monotone(criterion):
    t0 = time.perf_counter()
    ok = True
    worst_mean = 0.0
    for seed in range(20):
        rng = np.random.default_rng([5, seed])
        n, dim = int(rng.integers(2, 201)), int(rng.integers(1, 6))
        x = rng.normal(size=(n, dim)) * rng.uniform(0.1, 10)
        m = int(rng.integers(1, min(n, 12) + 1))
        _, _, trace = lbg_vq(x, m, seed=seed, return_trace=True)
        ok &= all(b <= a for a, b in zip(trace, trace[1:]))
        cb, _ = lbg_vq(x, 1, seed=seed)
        worst_mean = max(worst_mean, float(np.abs(cb[0] - x.mean(axis=0)).max()))
    dt = time.perf_counter() - t0
    ok = ok and worst_mean <= 1e-12 and dt < 5.0
    assert criterion(5, "LBG QE trace non-increasing, m=1 gives mean", ok,
                     f"max |mean err| {worst_mean:.1e}, {dt:.2f}s")


def _oracle_metrics(edges, w, x):
    dists = []
    bad = 0
    for s in x:
        d2 = []
        for row in w:
            acc = 0.0
            for a, b in zip(s, row):
                acc += (a - b) * (a - b)
            d2.append(acc)
        order = sorted(range(len(w)), key=lambda j: (d2[j], j))
        dists.append(math.sqrt(d2[order[0]]))
        bad += (min(order[0], order[1]), max(order[0], order[1])) not in edges
    return math.fsum(dists) / len(x), bad / len(x)


def test_06_metrics_match_oracle(criterion):
    ok = True
    for seed in range(10):
        rng = np.random.default_rng([6, seed])
        n = int(rng.integers(2, 11))
        g = make_random_connected(n, int(rng.integers(n - 1, n * (n - 1) // 2 + 1)), seed)
        dim = int(rng.integers(1, 4))
        g = g.with_weights(rng.random((n, dim)))
        x = rng.random((int(rng.integers(1, 101)), dim))
        qe, te = _oracle_metrics(set(g.edges), g.weights.tolist(), x.tolist())
        ok &= quantization_error(g, x) == qe and topographic_error(g, x) == te
    assert criterion(6, "QE and TE equal brute-force oracle exactly", ok)


def test_07_folding_demo(criterion):
    t0 = time.perf_counter()
    pairs = [folding_demo(seed) for seed in range(10)]
    dt = time.perf_counter() - t0
    wins = sum(c > lat for c, lat in pairs)
    ok = wins >= 9 and dt < 60.0
    detail = f"{wins}/10 seeds, te_chain mean {np.mean([p[0] for p in pairs]):.3f}, " \
             f"te_lattice mean {np.mean([p[1] for p in pairs]):.3f}, {dt:.1f}s"
    assert criterion(7, "te_chain > te_lattice on >= 9 of seeds 0..9", ok, detail)


def _contracted_edges(e):
    nodes = set(e.node_cells.values())
    seen = set()
    for (a, b), path in e.edge_paths.items():
        if path[0] != e.node_cells[a] or path[-1] != e.node_cells[b]:
            return None
        interior = path[1:-1]
        if any(c in nodes or c in seen for c in interior):
            return None
        seen.update(interior)
    return {(min(a, b), max(a, b)) for a, b in e.edge_paths}


def test_08_universal_embedding(criterion):
    suite = factory_suite()
    t0 = time.perf_counter()
    failures = []
    levels = {}
    for name, g in suite:
        try:
            e = embed_grid(g, 1, 4)
        except Exception as exc:  # reported, not hidden
            failures.append(f"{name}: {exc}")
            continue
        levels[e.level] = levels.get(e.level, 0) + 1
        contracted = _contracted_edges(e)
        if validate_embedding(g, e) or contracted != set(g.edges) or len(set(e.node_cells.values())) != g.n_nodes:
            failures.append(name)
    dt = time.perf_counter() - t0
    ok = not failures and dt < 120.0
    assert criterion(8, "factory suite embeds by level 4, contraction isomorphic", ok,
                     f"{len(suite)} grids, levels {dict(sorted(levels.items()))}, {dt:.1f}s, failures {failures}")


def test_09_ring8_level1(criterion):
    g = make_ring(8)
    e = embed_grid(g, 1, 1)
    sk = skeleton(1)
    cells = list(e.node_cells.values())
    coords = np.array([c.coords for c in cells])
    on_face = any(len(set(coords[:, ax])) == 1 and coords[0, ax] in (0, 2) for ax in range(3))
    # the 8 cells of that face in cycle order are consecutive ring nodes
    cyc = all(sk.index_of(e.node_cells[(i + 1) % 8]) in sk.neighbors(sk.index_of(e.node_cells[i]))
              for i in range(8))
    lengths = {len(p) for p in e.edge_paths.values()}
    geom = embedding_to_geometry(e)
    pts = list(geom.node_points.values()) + [p for poly in geom.link_polylines.values() for p in poly]
    members = all(is_sponge_member(p, 1) for p in pts)
    ok = e.level == 1 and on_face and cyc and lengths == {2} and members and not validate_embedding(g, e)
    assert criterion(9, "ring-8 at level 1 on a face 8-cycle, paths of length 2", ok)


def _run_all(out):
    rng = np.random.default_rng(99)
    data = out / "data.csv"
    out.mkdir()
    data.write_text("".join(f"{a!r},{b!r}\n" for a, b in rng.random((400, 2)).tolist()))
    codes = [
        main(["train", "--grid", "lattice2d:6x6", "--data", str(data), "--t-max", "4000",
              "--seed", "3", "--out", str(out / "model.json")]),
        main(["embed", "--model", str(out / "model.json"), "--seed", "3", "--out", str(out / "emb")]),
        main(["demo", "--seed", "2", "--out", str(out / "demo")]),
    ]
    files = {p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}
    return codes, files


def test_10_determinism(criterion, tmp_path):
    codes_a, a = _run_all(tmp_path / "a")
    codes_b, b = _run_all(tmp_path / "b")
    differing = sorted(k for k in a if a[k] != b.get(k))
    ok = codes_a == codes_b == [0, 0, 0] and set(a) == set(b) and not differing and len(a) > 10
    summary = json.loads(a["demo/summary.json"])
    assert criterion(10, "train/embed/demo reruns are byte-identical", ok,
                     f"{len(a)} files compared, differing {differing}, demo te {summary['te_chain']:.3f}/{summary['te_lattice']:.3f}")
