"""trailsmt: a trail-based, proof-carrying SMT solver for the union of
propositional logic, equality with uninterpreted functions, and linear
rational arithmetic, where inputs may assign values to first-order terms."""

from .terms import (
    BOOL,
    RAT,
    Assignment,
    AbsVal,
    BoolVal,
    IllSorted,
    NotBoolean,
    Problem,
    RatVal,
    Sort,
    Term,
    TermStore,
    TRUE,
    FALSE,
    evaluate,
    flip,
    ratval,
    relevant_basis,
    uninterp_sort,
)
from .kernel import Config, Solver, Stats, Verdict, extract_model, solve
from .proofs import CheckReport, LcfError, LcfKernel, Thm, check
from .trail import ConflictState, Trail, TrailItem

__all__ = [
    "BOOL",
    "RAT",
    "TRUE",
    "FALSE",
    "Assignment",
    "AbsVal",
    "BoolVal",
    "CheckReport",
    "Config",
    "ConflictState",
    "IllSorted",
    "LcfError",
    "LcfKernel",
    "NotBoolean",
    "Problem",
    "RatVal",
    "Solver",
    "Sort",
    "Stats",
    "Term",
    "TermStore",
    "Thm",
    "Trail",
    "TrailItem",
    "Verdict",
    "check",
    "evaluate",
    "extract_model",
    "flip",
    "ratval",
    "relevant_basis",
    "solve",
    "uninterp_sort",
]
