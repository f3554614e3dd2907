"""Exact linear rational arithmetic: linear forms, atom normalization,
Fourier-Motzkin elimination, and resolvent construction.

Shared by the LRA theory module (interval scans, resolvents), its inference
checker (validity = premises + negated conclusion FM-unsatisfiable), and the
brute-force oracle. All arithmetic is ``fractions.Fraction``; no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .terms import LRA_T, Term, TermStore


class NonLinear(Exception):
    """A product of two non-constant subterms was encountered."""


@dataclass(frozen=True)
class LinExpr:
    """Sum of coeff*leaf plus a constant. Leaves are non-LRA-headed terms."""

    coeffs: tuple[tuple[Term, Fraction], ...]  # sorted by term id, coeff != 0
    const: Fraction

    @staticmethod
    def make(coeffs: dict[Term, Fraction], const: Fraction) -> "LinExpr":
        items = tuple(
            (t, c) for t, c in sorted(coeffs.items(), key=lambda tc: tc[0].id) if c != 0
        )
        return LinExpr(items, Fraction(const))

    def coeff_of(self, t: Term) -> Fraction:
        for u, c in self.coeffs:
            if u is t:
                return c
        return Fraction(0)

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def leaves(self) -> list[Term]:
        return [t for t, _ in self.coeffs]

    def scale(self, k: Fraction) -> "LinExpr":
        if k == 0:
            return LinExpr((), Fraction(0))
        return LinExpr(tuple((t, c * k) for t, c in self.coeffs), self.const * k)

    def add(self, other: "LinExpr") -> "LinExpr":
        acc: dict[Term, Fraction] = {t: c for t, c in self.coeffs}
        for t, c in other.coeffs:
            acc[t] = acc.get(t, Fraction(0)) + c
        return LinExpr.make(acc, self.const + other.const)

    def sub(self, other: "LinExpr") -> "LinExpr":
        return self.add(other.scale(Fraction(-1)))

    def drop(self, t: Term) -> "LinExpr":
        return LinExpr(tuple((u, c) for u, c in self.coeffs if u is not t), self.const)


def linearize(t: Term) -> LinExpr:
    """Rat-sorted term -> linear form. Non-LRA-headed subterms are leaves."""
    head = t.head
    if head.numeral is not None:
        return LinExpr((), head.numeral)
    if head.owner != LRA_T:
        return LinExpr(((t, Fraction(1)),), Fraction(0))
    name = head.name
    if name == "+":
        acc = LinExpr((), Fraction(0))
        for a in t.args:
            acc = acc.add(linearize(a))
        return acc
    if name == "-":
        if len(t.args) == 1:
            return linearize(t.args[0]).scale(Fraction(-1))
        return linearize(t.args[0]).sub(linearize(t.args[1]))
    if name == "*":
        lhs = linearize(t.args[0])
        rhs = linearize(t.args[1])
        if lhs.is_const:
            return rhs.scale(lhs.const)
        if rhs.is_const:
            return lhs.scale(rhs.const)
        raise NonLinear(f"product of two non-constant terms in {t!r}")
    raise NonLinear(f"unexpected arithmetic head {name}")


# Relations are over "expr REL 0".
LE, LT, EQ, NE = "<=", "<", "=", "!="


@dataclass(frozen=True)
class Constraint:
    expr: LinExpr
    rel: str

    def negated(self) -> "Constraint":
        if self.rel == LE:  # not(e <= 0)  <=>  -e < 0
            return Constraint(self.expr.scale(Fraction(-1)), LT)
        if self.rel == LT:
            return Constraint(self.expr.scale(Fraction(-1)), LE)
        if self.rel == EQ:
            return Constraint(self.expr, NE)
        return Constraint(self.expr, EQ)


def atom_constraint(atom: Term, positive: bool) -> Constraint:
    """Normalize an LRA atom with its asserted polarity to expr REL 0."""
    name = atom.head.name
    lhs = linearize(atom.args[0])
    rhs = linearize(atom.args[1])
    diff = lhs.sub(rhs)
    if name == "<":
        c = Constraint(diff, LT)
    elif name == "<=":
        c = Constraint(diff, LE)
    elif name == "=":
        c = Constraint(diff, EQ)
    else:
        raise NonLinear(f"not an arithmetic atom: {atom!r}")
    return c if positive else c.negated()


def value_constraint(t: Term, q: Fraction) -> Constraint:
    """t = q, as a constraint (used for first-order premises)."""
    return Constraint(LinExpr(((t, Fraction(1)),), -Fraction(q)), EQ)


def _ground_holds(expr: LinExpr, rel: str) -> bool:
    if rel == LE:
        return expr.const <= 0
    if rel == LT:
        return expr.const < 0
    if rel == EQ:
        return expr.const == 0
    return expr.const != 0


def combine_bounds(lower: Constraint, upper: Constraint, var: Term) -> Optional[Constraint]:
    """FM resolvent eliminating ``var`` from one lower and one upper bound.

    ``lower`` must have a negative coefficient on var, ``upper`` a positive
    one. Strictness combines in the standard way (< if either side is <).
    Returns None for the trivially true 0 <= 0 resolvent.
    """
    a_up = upper.expr.coeff_of(var)
    a_lo = lower.expr.coeff_of(var)
    assert a_up > 0 and a_lo < 0
    combined = upper.expr.scale(-a_lo).add(lower.expr.scale(a_up))
    assert combined.coeff_of(var) == 0
    rel = LT if LT in (lower.rel, upper.rel) else LE
    if combined.is_const and _ground_holds(combined, rel):
        return None
    return Constraint(combined, rel)


def _eliminate(constraints: list[Constraint], var: Term) -> list[Constraint]:
    lowers, uppers, rest = [], [], []
    for c in constraints:
        k = c.expr.coeff_of(var)
        if k == 0:
            rest.append(c)
        elif k > 0:
            uppers.append(c)
        else:
            lowers.append(c)
    for lo in lowers:
        for up in uppers:
            r = combine_bounds(lo, up, var)
            if r is not None:
                rest.append(r)
    return rest


def fm_satisfiable(constraints: Iterable[Constraint]) -> bool:
    """Exact satisfiability over Q of a conjunction of linear constraints.

    Equalities are removed by substitution, disequalities by case split,
    inequalities by Fourier-Motzkin elimination. Exponential in the worst
    case; intended for desk-scale certificates and oracles.
    """
    todo = list(constraints)

    # Disequality case split: e != 0  <=>  e < 0 or -e < 0.
    for i, c in enumerate(todo):
        if c.rel == NE:
            rest = todo[:i] + todo[i + 1 :]
            left = rest + [Constraint(c.expr, LT)]
            right = rest + [Constraint(c.expr.scale(Fraction(-1)), LT)]
            return fm_satisfiable(left) or fm_satisfiable(right)

    # Gaussian step: use each equality to eliminate one variable.
    changed = True
    while changed:
        changed = False
        for i, c in enumerate(todo):
            if c.rel != EQ:
                continue
            if c.expr.is_const:
                if c.expr.const != 0:
                    return False
                todo.pop(i)
                changed = True
                break
            var, k = c.expr.coeffs[0]
            # var = -(rest)/k
            solution = c.expr.drop(var).scale(Fraction(-1, 1) / k)
            out = []
            for j, d in enumerate(todo):
                if j == i:
                    continue
                kd = d.expr.coeff_of(var)
                if kd == 0:
                    out.append(d)
                else:
                    out.append(Constraint(d.expr.drop(var).add(solution.scale(kd)), d.rel))
            todo = out
            changed = True
            break

    # Pure <= / < system: eliminate leaves one by one.
    while True:
        vars_left = sorted({t for c in todo for t in c.expr.leaves()}, key=lambda t: t.id)
        if not vars_left:
            break
        todo = _eliminate(todo, vars_left[0])

    return all(_ground_holds(c.expr, c.rel) for c in todo)


def render_constraint(c: Constraint, store: TermStore) -> Term:
    """Turn expr REL 0 back into an atom term ``lhs REL rhs``.

    Positive-coefficient parts (and a positive constant) go left, the rest
    right, each side a numeral / scaled leaf / ordered n-ary sum. This is the
    canonical spelling for derived atoms such as FM resolvents.
    """
    pos: list[Term] = []
    neg: list[Term] = []

    def part(t: Term, k: Fraction) -> Term:
        if k == 1:
            return t
        return store.mk_mul(store.mk_numeral(k), t)

    for t, k in c.expr.coeffs:
        if k > 0:
            pos.append(part(t, k))
        else:
            neg.append(part(t, -k))
    if c.expr.const > 0:
        pos.append(store.mk_numeral(c.expr.const))
    elif c.expr.const < 0:
        neg.append(store.mk_numeral(-c.expr.const))

    def side(parts: list[Term]) -> Term:
        if not parts:
            return store.mk_numeral(0)
        if len(parts) == 1:
            return parts[0]
        return store.mk_add(*parts)

    lhs, rhs = side(pos), side(neg)
    if c.rel == LT:
        return store.mk_lt(lhs, rhs)
    if c.rel == LE:
        return store.mk_le(lhs, rhs)
    if c.rel == EQ:
        return store.mk_eq(lhs, rhs)
    raise NonLinear("cannot render a disequality as a single atom")
