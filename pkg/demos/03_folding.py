"""A chain cannot cover a square without folding.

There is no topology-preserving map from a segment onto a square. Train a
64-unit chain and an 8x8 lattice on the same uniform data with the same
schedule: the chain folds, so its two best units for a sample are often far
apart along the chain. The topographic error counts exactly that. Run:

    python demos/03_folding.py
"""
import time

import numpy as np

from mengergrid import bmu, folding_demo, graph_distance, run_folding_demo, second_bmu

t0 = time.perf_counter()
rows = [(seed, *folding_demo(seed)) for seed in range(10)]
for seed, te_c, te_l in rows:
    print(f"seed {seed}: te_chain {te_c:.4f}  te_lattice {te_l:.4f}  {'chain worse' if te_c > te_l else 'lattice worse'}")
print(f"chain worse on {sum(c > l for _, c, l in rows)}/10 seeds in {time.perf_counter() - t0:.1f}s")

# %% How far apart are the two best units when they are not neighbours?
runs = run_folding_demo(0)
rep, data = runs["chain"]
gaps = [graph_distance(rep.grid, bmu(rep.grid, x), second_bmu(rep.grid, x)) for x in data[:500]]
hist = np.bincount(gaps)
print("chain, hop distance between 1st and 2nd BMU:", {i: int(n) for i, n in enumerate(hist) if n})
