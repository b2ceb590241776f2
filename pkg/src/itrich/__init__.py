"""Topological node strength and iterative weighted rich-club decomposition."""
from ._kernels import BACKEND
from .graph import Graph, GraphError, KShellResult, k_shell_decomposition, load_edge_list
from .weights import WeightedGraph, compute_weighted_graph

__version__ = "0.1.0"
