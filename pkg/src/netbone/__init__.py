"""Network backbone discovery from shortest-path traffic."""

from .bench import BenchResult, gen_power_law, run_bench
from .discovery import (
    DiscoveryConfig,
    DiscoveryResult,
    discover,
    discover_iter,
    discover_mcg,
    discover_vb,
)
from .graph import (
    EdgeListParseError,
    Graph,
    induced_subgraph,
    is_connected,
    largest_component,
    parse_edge_list,
)
from .models import (
    Backbone,
    CentroidRow,
    IncomingPartition,
    ModelReport,
    loglik_bimodal,
    loglik_independent,
    loglik_markovian,
    model_report,
    neg_log_lr_vertex,
    neg_log_lr_vertexset,
    param_counts,
    vertex_benefit_F,
)
from .partition import PartitionTrace, bi_kl_partition, gbi_kl_partition
from .pathstats import (
    PathStats,
    brute_force_stats,
    canonical_paths_stats,
    vertex_betweenness,
)
from .subgraph import (
    WeightedVertexGraph,
    exact_backbone_oracle,
    exact_mcg_oracle,
    mcg_heuristic,
    steiner_approx,
)

__version__ = "0.1.0"
