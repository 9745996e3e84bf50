"""Exact and approximate counting of graph homomorphisms, surjective
homomorphisms, compactions and retractions."""

from .brute import ListAssignment, RetractionInstance, count_comp, count_hom, count_ret, count_sur
from .classifier import classify_approx, classify_exact, count_problem, select_method
from .decomposition import build_table, comp_via_decomposition, comp_via_moebius
from .graph import Graph, parse_graph, read_graph

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "ListAssignment",
    "RetractionInstance",
    "build_table",
    "classify_approx",
    "classify_exact",
    "comp_via_decomposition",
    "comp_via_moebius",
    "count_comp",
    "count_hom",
    "count_problem",
    "count_ret",
    "count_sur",
    "parse_graph",
    "read_graph",
    "select_method",
]
