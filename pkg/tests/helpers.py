"""Shared builders for the test suite."""

from __future__ import annotations

from fractions import Fraction

from trailsmt.terms import (
    Assignment,
    BoolVal,
    Problem,
    RatVal,
    TermStore,
    func_sym,
    uninterp_sort,
)

U = uninterp_sort("U")


def bool_problem():
    """Store with Boolean constants A, B plus an empty problem."""
    st = TermStore()
    return st, Problem(st)


def asg(term, value):
    if isinstance(value, bool):
        return Assignment(term, BoolVal(value))
    if isinstance(value, (int, Fraction)):
        return Assignment(term, RatVal(Fraction(value)))
    return Assignment(term, value)


def problem_with(st: TermStore, *inputs) -> Problem:
    p = Problem(st)
    for a in inputs:
        p.add_input(a)
    return p


def unary_f(st: TermStore):
    return func_sym("f", (U,), U)
