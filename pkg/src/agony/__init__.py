"""Ranking hierarchies in directed graphs.

Agony of a ranking, exact and heuristic minimizers, the ranked stochastic
block model, first-order theory of its resolution limit, and experiment
drivers.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .evaluate import EvalReport, agony, agony_value, hierarchy_score, penalty
from .graph import (
    DirectedGraph,
    EdgeListParseError,
    GraphError,
    dag_ranking,
    invert_ranking,
    is_dag,
    load_edge_list,
    merge_ranking,
    normalize_ranking,
    planted_ranking,
    read_edge_list,
    save_edge_list,
    trivial_ranking,
)
from .metrics import ConfusionMatrix, adjusted_rand_index, confusion_matrix
from .rsbm import RsbmParams, affinity_matrix, estimate_affinity, hierarchy_constraint_ok, s_max, sample
from .solve import (
    IterationTree,
    SolveReport,
    brute_force,
    canonicalize,
    iterated_agony,
    minimize,
    minimize_d0,
    minimize_d1,
)

__all__ = [
    "BACKEND",
    "ConfusionMatrix",
    "DirectedGraph",
    "EdgeListParseError",
    "EvalReport",
    "GraphError",
    "IterationTree",
    "RsbmParams",
    "SolveReport",
    "adjusted_rand_index",
    "affinity_matrix",
    "agony",
    "agony_value",
    "brute_force",
    "canonicalize",
    "confusion_matrix",
    "dag_ranking",
    "estimate_affinity",
    "hierarchy_constraint_ok",
    "hierarchy_score",
    "invert_ranking",
    "is_dag",
    "iterated_agony",
    "load_edge_list",
    "merge_ranking",
    "minimize",
    "minimize_d0",
    "minimize_d1",
    "normalize_ranking",
    "penalty",
    "planted_ranking",
    "read_edge_list",
    "s_max",
    "sample",
    "save_edge_list",
    "trivial_ranking",
]
