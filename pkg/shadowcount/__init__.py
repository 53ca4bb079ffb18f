"""
shadowcount: k-clique and near-clique counting with Turán-shadow sampling.
"""
from .estimators import (
    Estimate,
    Mode,
    PatternKind,
    PatternSpec,
    estimate,
    inverse_ts,
    list_near_cliques,
    peanuts,
    required_samples,
)
from .exact_oracle import ExactCounts, enumerate_cliques, exact_counts, naive_subset_counts
from .graph_core import Graph, build_graph, degeneracy_order, load_edge_list
from .shadow_engine import build_prefixed_shadow

__version__ = "0.1.0"

__all__ = [
    "Estimate",
    "ExactCounts",
    "Graph",
    "Mode",
    "PatternKind",
    "PatternSpec",
    "build_graph",
    "build_prefixed_shadow",
    "degeneracy_order",
    "enumerate_cliques",
    "estimate",
    "exact_counts",
    "inverse_ts",
    "list_near_cliques",
    "load_edge_list",
    "naive_subset_counts",
    "peanuts",
    "required_samples",
]
