"""Local link prediction in bipartite networks.

Common-neighbour and local-community-paradigm (LCP) indices computed
directly in the bipartite domain, one-mode-projection baselines, the
repeated random-removal evaluation protocol and the LCP-decomposition and
topology statistics.
"""

import warnings

warnings.filterwarnings("ignore", message=".*TBB threading layer.*")

from .bigraph import (  # noqa: E402
    BipartiteGraph,
    EdgeSet,
    GraphError,
    NodeRef,
    ParseError,
    Partition,
    candidate_array,
    candidate_pairs,
    degree,
    has_edge,
    left,
    parse_edge_list,
    read_edge_list,
    remove_edges,
    right,
)
from .datasets import REGISTRY, DatasetError, fetch_dataset, load_dataset  # noqa: E402
from .evaluator import (  # noqa: E402
    ExperimentResult,
    RankedCandidates,
    RemovalSplit,
    aggregate_classes,
    aupr,
    precision_at_L,
    rank_candidates,
    run_experiment,
    sample_removal,
)
from .local_indices import (  # noqa: E402
    IndexKind,
    LocalCommunity,
    community_tables,
    local_community,
    score,
    score_all,
    score_matrix,
)
from .network_analysis import (  # noqa: E402
    TopoStats,
    avg_betweenness,
    latapy_clustering,
    lcp_decomposition,
    robins_alexander_clustering,
    topo_stats,
)
from .projection import (  # noqa: E402
    SimilarityKind,
    nbi_score,
    pair_similarity,
    score_all_baseline,
    similarity_score,
)
from .stats import benjamini_hochberg, mann_whitney_u, pearson_corr, spearman_corr  # noqa: E402

__version__ = "0.1.0"
