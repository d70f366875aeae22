"""Exact time-dependent shortest paths over a tree-decomposition index,
optionally accelerated by shortcuts chosen under a breakpoint budget."""
from .decomposition import TreeDecomposition, build_tfp_tree
from .errors import TDSPError, Unreachable
from .graph import TDGraph, Query, load_graph, load_queries, write_graph
from .oracle import td_dijkstra
from .plf import PLF, compound, min_plf
from .query import basic_query
from .shortcut_query import query_with_shortcuts
from .shortcuts import build_all_candidates, select_dp, select_greedy, update_edge

__all__ = [
    "PLF", "compound", "min_plf",
    "TDGraph", "Query", "load_graph", "load_queries", "write_graph",
    "TreeDecomposition", "build_tfp_tree",
    "basic_query", "query_with_shortcuts", "td_dijkstra",
    "build_all_candidates", "select_dp", "select_greedy", "update_edge",
    "TDSPError", "Unreachable",
]
