"""Linear arithmetic core: linearization, FM elimination, resolvents."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from trailsmt.linarith import (
    Constraint,
    LE,
    LT,
    NonLinear,
    atom_constraint,
    combine_bounds,
    fm_satisfiable,
    linearize,
    render_constraint,
    value_constraint,
)
from trailsmt.terms import RAT, TermStore


def _store_vars():
    store = TermStore()
    return store, store.mk_const("x", RAT), store.mk_const("y", RAT)


def test_linearize_combines_terms():
    store, x, y = _store_vars()
    t = store.mk_add(store.mk_mul(store.mk_numeral(2), x), y, store.mk_numeral(3))
    e = linearize(t)
    assert e.coeff_of(x) == 2 and e.coeff_of(y) == 1 and e.const == 3


def test_linearize_rejects_products():
    store, x, y = _store_vars()
    with pytest.raises(NonLinear):
        linearize(store.mk_mul(x, y))


def test_atom_constraint_polarity():
    store, x, y = _store_vars()
    atom = store.mk_le(x, y)
    pos = atom_constraint(atom, True)
    neg = atom_constraint(atom, False)
    assert pos.rel == LE and pos.expr.coeff_of(x) == 1
    assert neg.rel == LT and neg.expr.coeff_of(x) == -1  # not(x<=y) is y<x


def test_fm_satisfiable_basics():
    store, x, y = _store_vars()
    le = lambda t, c: atom_constraint(store.mk_le(t, store.mk_numeral(c)), True)
    ge = lambda t, c: atom_constraint(store.mk_le(store.mk_numeral(c), t), True)
    assert fm_satisfiable([ge(x, 0), le(x, 1)])
    assert not fm_satisfiable([ge(x, 1), le(x, 0)])
    assert fm_satisfiable([value_constraint(x, Fraction(3)), ge(x, 3)])
    assert not fm_satisfiable([value_constraint(x, Fraction(3)), ge(x, 4)])


def test_fm_satisfiable_disequality_split():
    store, x, y = _store_vars()
    eq = atom_constraint(store.mk_eq(x, store.mk_numeral(2)), True)
    ne = atom_constraint(store.mk_eq(x, store.mk_numeral(2)), False)
    assert not fm_satisfiable([eq, ne])
    ne_other = atom_constraint(store.mk_eq(x, store.mk_numeral(5)), False)
    assert fm_satisfiable([eq, ne_other])


@st.composite
def bound_pair(draw):
    """Lower and upper bound rows a*x + b*y + c (lower has a<0, upper a>0)."""
    nz = st.integers(-3, 3).filter(lambda v: v != 0)
    a_lo = -draw(st.integers(1, 3))
    a_up = draw(st.integers(1, 3))
    b_lo, b_up = draw(nz), draw(nz)
    c_lo, c_up = draw(st.integers(-4, 4)), draw(st.integers(-4, 4))
    strict_lo, strict_up = draw(st.booleans()), draw(st.booleans())
    return (a_lo, b_lo, c_lo, strict_lo), (a_up, b_up, c_up, strict_up)


@given(bound_pair())
def test_fm_resolvent_entailed_on_grid_with_certificate(pair):
    """Spot-check resolvent soundness: every rational grid point satisfying
    both bounds satisfies the resolvent, and the resolvent equals the
    positive linear combination of the two rows (the certificate)."""
    (a1, b1, c1, s1), (a2, b2, c2, s2) = pair
    store, x, y = _store_vars()

    def row(a, b, c, strict):
        from trailsmt.linarith import LinExpr

        expr = LinExpr.make({x: Fraction(a), y: Fraction(b)}, Fraction(c))
        return Constraint(expr, LT if strict else LE)

    lower = row(a1, b1, c1, s1)
    upper = row(a2, b2, c2, s2)
    r = combine_bounds(lower, upper, x)
    if r is None:
        return  # trivially true resolvent
    # certificate: r = (-a1) * upper + a2 ... with the standard multipliers
    lam_up, lam_lo = Fraction(-a1), Fraction(a2)
    combo = upper.expr.scale(lam_up).add(lower.expr.scale(lam_lo))
    assert combo.coeffs == r.expr.coeffs and combo.const == r.expr.const
    assert r.rel == (LT if (s1 or s2) else LE)

    def holds(c, px, py):
        v = c.expr.const
        v += c.expr.coeff_of(x) * px + c.expr.coeff_of(y) * py
        return v < 0 if c.rel == LT else v <= 0

    grid = [Fraction(n, 2) for n in range(-8, 9)]
    for px in grid:
        for py in grid:
            if holds(lower, px, py) and holds(upper, px, py):
                assert holds(r, px, py)


def test_render_constraint_splits_signs():
    store, x, y = _store_vars()
    from trailsmt.linarith import LinExpr

    expr = LinExpr.make({x: Fraction(1), y: Fraction(-1)}, Fraction(0))
    t = render_constraint(Constraint(expr, LT), store)
    assert t is store.mk_lt(x, y)
    expr2 = LinExpr.make({x: Fraction(2)}, Fraction(-3))
    t2 = render_constraint(Constraint(expr2, LE), store)
    assert t2 is store.mk_le(store.mk_mul(store.mk_numeral(2), x), store.mk_numeral(3))
