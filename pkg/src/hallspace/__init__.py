"""(2,4)-matchings, the Cover game, and space checkers for Resolution and PCR."""

from .kernels import BACKEND
from .graphs import BipartiteGraph, Hypergraph, is_expander, neighborhood, neighborhood_hypergraph
from .matchings import (
    Component,
    HKMatching,
    counterexample,
    find_cover_matching,
    two_path_cover,
    validate_matching,
)
from .covergame import GameParams, cover_respond, is_robust, mu, play
from .cnf import Cnf, PartialAssignment, Polynomial, random_3cnf, tr_encode
from .strategies import lower_bound_report, verify_free_family, verify_winning_strategy
from .proofspace import check_pcr_trace, check_res_trace

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BipartiteGraph",
    "Cnf",
    "Component",
    "GameParams",
    "HKMatching",
    "Hypergraph",
    "PartialAssignment",
    "Polynomial",
    "check_pcr_trace",
    "check_res_trace",
    "counterexample",
    "cover_respond",
    "find_cover_matching",
    "is_expander",
    "is_robust",
    "lower_bound_report",
    "mu",
    "neighborhood",
    "neighborhood_hypergraph",
    "play",
    "random_3cnf",
    "tr_encode",
    "two_path_cover",
    "validate_matching",
    "verify_free_family",
    "verify_winning_strategy",
]
