"""Desk-scale toolkit for chromatic generalized Ramsey numbers.

Explicit lower-bound colorings, exact chromatic-(p, q) verification,
eps-dense pair extraction, a certified recursive color-reduction engine
with an independent replay checker, and exhaustive search for small
exact values.
"""

from .chromatic import (PqVerdict, chromatic_number, is_chromatic_pq_coloring,
                        proper_coloring)
from .constructions import (BoundReport, binary_coloring, check_recurrence,
                            product_upper_bound,
                            verify_binary_union_chromatic)
from .dense_pairs import (DensePair, DensenessCheck, IntersectSelection,
                          SparsityWitness, find_dense_pair,
                          find_dense_pair_sized, intersect_select,
                          is_eps_dense, is_sparse_color)
from .graphs import ColoredCompleteGraph, SimpleGraph, VertexSet
from .reduction import (EngineParams, LevelStructure, ReductionCertificate,
                        ReductionTrace, ReplayReport, RestrictionProfile,
                        input_digest, replay_trace, run_reduction)
from .search import SearchResult, compute_F, compute_F_chi, tabulate

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ColoredCompleteGraph",
    "DensePair",
    "DensenessCheck",
    "EngineParams",
    "IntersectSelection",
    "LevelStructure",
    "PqVerdict",
    "ReductionCertificate",
    "ReductionTrace",
    "ReplayReport",
    "RestrictionProfile",
    "SearchResult",
    "SimpleGraph",
    "SparsityWitness",
    "VertexSet",
    "binary_coloring",
    "check_recurrence",
    "chromatic_number",
    "compute_F",
    "compute_F_chi",
    "find_dense_pair",
    "find_dense_pair_sized",
    "input_digest",
    "intersect_select",
    "is_chromatic_pq_coloring",
    "is_eps_dense",
    "is_sparse_color",
    "proper_coloring",
    "product_upper_bound",
    "replay_trace",
    "run_reduction",
    "tabulate",
    "verify_binary_union_chromatic",
    "__version__",
]
