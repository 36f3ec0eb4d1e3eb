"""Peano's curve and two ways of quantising the unit square.

LBG places codewords with no notion of neighbours. A Kohonen map places the
same number of codewords but ties them to a grid, so neighbouring units end
up with neighbouring weights. Run:

    python demos/02_peano_and_quantisation.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from mengergrid import (
    TrainingSchedule, init_weights, lbg_vq, make_lattice2d, peano_polyline, quantization_error,
    som_train, topographic_error,
)
from mengergrid import formats

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

# %% The Peano polyline: 9^p subsquare centres in serpentine order.
for p in (1, 2, 3):
    pts = peano_polyline(p)
    step = np.abs(np.diff(pts, axis=0)).max(axis=1)
    print(f"order {p}: {len(pts)} points, every step {step.min():.5f} = 3^-{p}")
print("order 1:", (peano_polyline(1) * 6).round().astype(int).tolist())

# %% LBG codebook for 1000 uniform samples.
rng = np.random.default_rng(0)
data = rng.random((1000, 2))
codebook, mse, trace = lbg_vq(data, 16, seed=0, return_trace=True)
print(f"LBG, 16 codewords: {len(trace) - 1} iterations, mean squared error {trace[0]:.4f} -> {mse:.4f}")

# %% The same budget as a 4x4 Kohonen lattice.
g = init_weights(make_lattice2d(4, 4), data, 0)
rep = som_train(g, data, TrainingSchedule(8000, sigma0=2.0), seed=0, epochs=8)
print("SOM quantisation error per epoch:", np.round(rep.qe_trace, 4).tolist())
print(f"SOM: qe {quantization_error(rep.grid, data):.4f}, te {topographic_error(rep.grid, data):.3f}")

# Give the LBG codebook the same lattice: its topographic error shows that
# plain vector quantisation ignores neighbourhoods.
lbg_grid = make_lattice2d(4, 4).with_weights(codebook)
print(f"LBG codewords on a 4x4 lattice: te {topographic_error(lbg_grid, data):.3f}")

formats.write_files({
    out / "peano3.csv": formats.format_csv(peano_polyline(3).tolist()),
    out / "peano3.obj": formats.polyline_obj(peano_polyline(3).tolist(), [list(range(729))]),
})
