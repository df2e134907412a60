"""Rank-maximal matchings: solving, switching graphs, enumeration, counting, popularity."""

from .counting import count_rmms, hardness_gadget, reduce_to_bpm
from .instance import (
    Matching,
    PreferenceInstance,
    compare_signatures,
    parse_instance,
    parse_matching,
    signature_of,
)
from .popularity import PopularityVerdict, check_popular, popular_rmms
from .solver import solve, verify_trace
from .switching import analyze, apply_switch, build_switching_graph, enumerate_rmms, rmm_pairs

__all__ = [
    "Matching",
    "PopularityVerdict",
    "PreferenceInstance",
    "analyze",
    "apply_switch",
    "build_switching_graph",
    "check_popular",
    "compare_signatures",
    "count_rmms",
    "enumerate_rmms",
    "hardness_gadget",
    "parse_instance",
    "parse_matching",
    "popular_rmms",
    "reduce_to_bpm",
    "rmm_pairs",
    "signature_of",
    "solve",
    "verify_trace",
]
