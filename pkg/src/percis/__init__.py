"""Percolation centrality: exact computation and importance-sampling estimates."""
from .bounds import (BoundParams, SampleCapExceeded, percis, percis_di, sample_size_di,
                     sample_size_theorem1, sample_size_unif, unif)
from .estimators import (CentralityScores, brute_force_percolation, estimate_importance,
                         estimate_uniform, exact_betweenness, exact_percolation)
from .graph import EdgeListError, Graph, load_edge_list, vertex_diameter_ub
from .metrics import avg_error, jaccard_topk, max_error, target_error_search
from .sampling import draw_batch, random_shortest_path, summarize
from .states import PercolationStates, UndefinedCentralityError, build_states, gen_states

__version__ = "0.1.0"

__all__ = [
    "BoundParams", "CentralityScores", "EdgeListError", "Graph", "PercolationStates",
    "SampleCapExceeded", "UndefinedCentralityError", "avg_error", "brute_force_percolation",
    "build_states", "draw_batch", "estimate_importance", "estimate_uniform", "exact_betweenness",
    "exact_percolation", "gen_states", "jaccard_topk", "load_edge_list", "max_error", "percis",
    "percis_di", "random_shortest_path", "sample_size_di", "sample_size_theorem1",
    "sample_size_unif", "summarize", "target_error_search", "unif", "vertex_diameter_ub",
]
