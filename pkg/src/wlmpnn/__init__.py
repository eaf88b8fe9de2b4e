"""WL color refinement, one-dimensional MPNNs under controlled precision, and their k-order versions."""

__version__ = "0.1.0"

from .graph import (
    Graph,
    IngestionError,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    generate_barabasi_albert,
    generate_erdos_renyi,
    load_cora,
    load_edge_list,
    neighbors,
    path_graph,
    star_graph,
    write_edge_list,
)
from .mpnn import (
    FeatureAssignment,
    MpnnConfig,
    activation_eval,
    init_features,
    mpnn_distinguish,
    mpnn_readout,
    mpnn_run,
    mpnn_step,
)
from .precision import PrecisionContext, from_hex, to_hex
from .wl import Labeling, Partition, WLTrace, partitions_equivalent, wl_distinguish, wl_run, wl_step
