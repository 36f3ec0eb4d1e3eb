"""Neuron grids as curves: Menger's universal curve, Kohonen maps, and embeddings.

The package builds level-k approximations of the Menger sponge, trains vector
quantisers (LBG and graph-topology SOMs), measures how well a trained grid
preserves neighbourhoods, and embeds any connected grid in the sponge so that
the result can be drawn in three dimensions.
"""

from .embed import (
    Embedding,
    GridGeometry,
    embed_grid,
    embedding_to_geometry,
    refine_embedding,
    validate_embedding,
)
from .errors import CapacityError, DomainError, MengerGridError, ValidationError
from .grid import (
    NeuronGrid,
    from_edge_list,
    graph_distance,
    init_weights,
    make_chain,
    make_lattice2d,
    make_lattice3d,
    make_random_connected,
    make_ring,
    peano_polyline,
)
from .metrics import (
    TopologyMetrics,
    folding_demo,
    quantization_error,
    run_folding_demo,
    second_bmu,
    topographic_error,
    topology_metrics,
)
from .sponge import (
    SpongeCell,
    SpongeSkeleton,
    TriadicDigits,
    cell_center,
    enumerate_cells,
    has_alternative_expansion,
    is_sponge_member,
    skeleton,
    to_triadic,
)
from .training import (
    Dataset,
    TrainingReport,
    TrainingSchedule,
    bmu,
    lbg_vq,
    som_step,
    som_train,
)

__all__ = [
    "CapacityError",
    "Dataset",
    "DomainError",
    "Embedding",
    "GridGeometry",
    "MengerGridError",
    "NeuronGrid",
    "SpongeCell",
    "SpongeSkeleton",
    "TopologyMetrics",
    "TrainingReport",
    "TrainingSchedule",
    "TriadicDigits",
    "ValidationError",
    "bmu",
    "cell_center",
    "embed_grid",
    "embedding_to_geometry",
    "enumerate_cells",
    "folding_demo",
    "from_edge_list",
    "graph_distance",
    "has_alternative_expansion",
    "init_weights",
    "is_sponge_member",
    "lbg_vq",
    "make_chain",
    "make_lattice2d",
    "make_lattice3d",
    "make_random_connected",
    "make_ring",
    "peano_polyline",
    "quantization_error",
    "refine_embedding",
    "run_folding_demo",
    "second_bmu",
    "skeleton",
    "som_step",
    "som_train",
    "to_triadic",
    "topographic_error",
    "topology_metrics",
    "validate_embedding",
]

__version__ = "0.1.0"
