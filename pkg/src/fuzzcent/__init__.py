"""Fuzzy-graph centrality measures and their evaluation harness."""

from .centrality import (
    FuzzyDegreeSet,
    Method,
    NeighborMode,
    RankingResult,
    fd,
    fuzzy_degree_set,
    nfdc,
    nfrh,
    possibility_geq,
    rank,
)
from .diffusion import SirParams, SpreadEstimate, default_beta, estimate_spread, simulate_sir, spread_table
from .evaluation import ImprecisionPoint, RobustnessCurve, imprecision, robustness, runtime_bench
from .graphcore import (
    EdgeListError,
    FuzzyGraph,
    GraphStats,
    fuzzify,
    graph_stats,
    lcc_size,
    parse_edge_list,
    read_edge_list,
    serialize_edge_list,
)

__version__ = "0.1.0"
