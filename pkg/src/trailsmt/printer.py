"""Deterministic text renderings of terms, values, and assignments.

Two styles: SMT-LIB s-expressions (scripts, models, proof files) and a
compact infix form for trace lines (`(x<z)<-false`).
"""

from __future__ import annotations

from fractions import Fraction

from .terms import AbsVal, Assignment, BoolVal, EUF_T, RatVal, Term, Value

_CONNECTIVES = ("not", "and", "or", "=>")


def rational_sexpr(q: Fraction) -> str:
    if q < 0:
        return f"(- {rational_sexpr(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    return f"(/ {q.numerator} {q.denominator})"


def value_sexpr(v: Value) -> str:
    if isinstance(v, BoolVal):
        return "true" if v.value else "false"
    if isinstance(v, RatVal):
        return rational_sexpr(v.value)
    return f"(abs {v.sort} {v.index})"


def term_sexpr(t: Term) -> str:
    head = t.head
    if head.numeral is not None:
        return rational_sexpr(head.numeral)
    if not t.args:
        return head.name
    return f"({head.name} {' '.join(term_sexpr(a) for a in t.args)})"


def value_compact(v: Value) -> str:
    if isinstance(v, BoolVal):
        return "true" if v.value else "false"
    if isinstance(v, RatVal):
        return str(v.value)
    return f"(abs {v.sort} {v.index})"


def term_compact(t: Term) -> str:
    head = t.head
    if head.numeral is not None:
        return str(head.numeral)
    if not t.args:
        return head.name
    name = head.name
    if name in ("<", "<=", "="):
        a, b = t.args
        return f"({term_compact(a)}{name}{term_compact(b)})"
    if head.owner == EUF_T:
        return f"{name}({','.join(term_compact(a) for a in t.args)})"
    if name in _CONNECTIVES:
        return f"({name} {' '.join(term_compact(a) for a in t.args)})"
    if name == "+":
        return f"({'+'.join(term_compact(a) for a in t.args)})"
    if name == "-":
        if len(t.args) == 1:
            return f"(-{term_compact(t.args[0])})"
        return f"({term_compact(t.args[0])}-{term_compact(t.args[1])})"
    if name == "*":
        return f"({term_compact(t.args[0])}*{term_compact(t.args[1])})"
    return f"({name} {' '.join(term_compact(a) for a in t.args)})"


def assignment_compact(a: Assignment) -> str:
    return f"{term_compact(a.term)}<-{value_compact(a.value)}"


def trace_line(
    step: int,
    rule: str,
    module: str | None,
    assignment: Assignment | None,
    level: int | None,
    esize: int | None,
) -> str:
    """One tab-separated transition event, byte-stable across runs."""
    return "\t".join(
        (
            str(step),
            rule,
            module if module is not None else "-",
            assignment_compact(assignment) if assignment is not None else "-",
            str(level) if level is not None else "-",
            str(esize) if esize is not None else "-",
        )
    )
