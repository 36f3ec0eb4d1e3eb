"""Menger's sponge from triadic digits.

A point is in the level-k sponge when its coordinates have base-3 expansions
that never put a 1 in the same position on two axes. Run:

    python demos/01_sponge_and_triadic.py [outdir]
"""
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from mengergrid import (
    cell_center, enumerate_cells, has_alternative_expansion, is_sponge_member, skeleton, to_triadic,
)
from mengergrid import formats

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

# %% Triadic digits.
# 1/2 = 0.111..., so three digits leave a small residual.
d = to_triadic(0.5, 3)
print("1/2 ->", d.digits, "exact:", d.exact, "residual:", d.residual)

# 1/3 has two expansions: 0.1000... and 0.0222...
third = to_triadic(Fraction(1, 3), 2)
print("1/3 ->", third.digits, "or", has_alternative_expansion(third).digits, "+ tail of 2s")

# %% Membership.
# The body centre is removed at the very first step.
print("centre in level 1:", is_sponge_member((0.5, 0.5, 0.5), 1))
# (1/3, 2/3, 0) survives because 1/3 can be written without a leading 1.
print("(1/3, 2/3, 0) in level 2:", is_sponge_member((1 / 3, 2 / 3, 0), 2))

# Floats within 3^-(k+2) of a cell face are snapped onto it, so membership is
# stable for values like 1/3 that floats cannot hold exactly. The same points
# passed as exact Fractions are not snapped and match the kept volume (20/27)^k.
rng = np.random.default_rng(0)
pts = rng.random((4000, 3))
for k in (1, 2, 3):
    snapped = np.mean([is_sponge_member(tuple(p), k) for p in pts])
    exact = np.mean([is_sponge_member(tuple(map(Fraction, p)), k) for p in pts])
    print(f"k={k}: kept {snapped:.3f} as floats, {exact:.3f} as rationals, volume {(20 / 27) ** k:.3f}")

# %% Cells and the skeleton graph.
for k in range(4):
    sk = skeleton(k)
    deg = np.bincount(np.asarray(sk.edges).ravel(), minlength=len(sk)) if len(sk.edges) else [0]
    print(f"level {k}: {len(sk)} cells, {len(sk.edges)} face contacts, max degree {max(deg)}")

print("first level-2 cell centre:", cell_center(enumerate_cells(2)[0]))

# %% Export level 2 for a 3-D viewer.
files = formats.write_files({
    out / "sponge2.obj": formats.sponge_obj(skeleton(2)),
    out / "sponge2_cubes.obj": formats.sponge_obj(skeleton(2), cubes=True),
})
print("wrote", *map(str, files))
