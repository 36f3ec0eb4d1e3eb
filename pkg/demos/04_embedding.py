"""Every connected grid lives inside the sponge.

The level-k skeleton is a finite stand-in for the universal curve. Nodes go to
cells and links become vertex-disjoint cell paths, so contracting each path
gives the grid back. The result is a 3-D drawing of any grid. Run:

    python demos/04_embedding.py [outdir]
"""
import sys
from pathlib import Path

from mengergrid import (
    embed_grid, embedding_to_geometry, make_chain, make_lattice2d, make_lattice3d,
    make_random_connected, make_ring, refine_embedding, validate_embedding,
)
from mengergrid import formats

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

grids = {
    "ring8": make_ring(8),
    "chain32": make_chain(32),
    "lattice5x5": make_lattice2d(5, 5),
    "cube3": make_lattice3d(3, 3, 3),
    "random16": make_random_connected(16, 24, seed=1, max_degree=6),
}
files = {}
for name, g in grids.items():
    e = embed_grid(g, k_start=1, k_max=4, seed=0)
    cells = sum(len(p) - 2 for p in e.edge_paths.values())
    print(f"{name:11s} {g.n_nodes:3d} nodes {g.n_edges:3d} links -> level {e.level}, "
          f"{cells} link cells, violations {validate_embedding(g, e)}")
    files[out / f"{name}.obj"] = formats.geometry_obj(embedding_to_geometry(e), e.level)

# %% The ring fits on one face of the level-1 sponge.
e = embed_grid(make_ring(8), 1, 1)
print("ring8 cells:", [e.node_cells[v].coords for v in range(8)])

# Refining every cell into its corner child keeps the embedding valid.
fine = refine_embedding(e)
print("refined to level", fine.level, "violations:", validate_embedding(make_ring(8), fine))

print("wrote", len(formats.write_files(files)), "OBJ files to", out)
