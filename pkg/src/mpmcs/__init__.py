"""Maximum probability minimal cut sets of fault trees via weighted partial MaxSAT."""

from .core import (
    BasicEvent,
    FaultTree,
    Gate,
    evaluate,
    is_cut_set,
    is_minimal_cut_set,
    joint_probability,
    load_tree,
    save_tree,
    to_expression,
    validate,
)
from .encode import VarMap, build_weights, compute_shift, encode, flip_gates, negate_to_nnf, tseitin
from .engine import BranchAndBound, MaxSatOutcome, Status
from .gen import GenConfig, composition, generate
from .oracle import enumerate_mcs, mpmcs_brute, mpmcs_brute_int
from .solve import MpmcsResult, SolveBudget, decode, portfolio, solve
from .wcnf import TOP, WcnfInstance, emit_wcnf, parse_wcnf

__version__ = "0.1.0"

__all__ = [
    "BasicEvent", "FaultTree", "Gate", "evaluate", "is_cut_set", "is_minimal_cut_set",
    "joint_probability", "load_tree", "save_tree", "to_expression", "validate",
    "VarMap", "build_weights", "compute_shift", "encode", "flip_gates", "negate_to_nnf",
    "tseitin", "BranchAndBound", "MaxSatOutcome", "Status", "GenConfig", "composition",
    "generate", "enumerate_mcs", "mpmcs_brute", "mpmcs_brute_int", "MpmcsResult",
    "SolveBudget", "decode", "portfolio", "solve", "TOP", "WcnfInstance", "emit_wcnf",
    "parse_wcnf",
]
