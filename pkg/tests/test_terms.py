"""Term algebra: interning, flip, evaluation, relevant basis."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from trailsmt.terms import (
    BOOL,
    BoolVal,
    IllSorted,
    NotBoolean,
    RAT,
    RatVal,
    TermStore,
    evaluate,
    flip,
    relevant_basis,
)
from helpers import asg, problem_with, unary_f, U


def test_intern_canonical_identity():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    t1 = store.mk_or(store.mk_not(a), b)
    t2 = store.mk_or(store.mk_not(a), b)
    assert t1 is t2
    assert t1.id == t2.id


def test_intern_equality_is_boolean_sorted():
    store = TermStore()
    x = store.mk_const("x", RAT)
    y = store.mk_const("y", RAT)
    assert store.mk_eq(x, y).sort.is_bool


def test_intern_mixed_sorts_rejected():
    store = TermStore()
    x = store.mk_const("x", RAT)
    p = store.mk_const("p", BOOL)
    with pytest.raises(IllSorted):
        store.mk_eq(x, p)


def test_intern_arity_mismatch():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    from trailsmt.terms import or_sym

    with pytest.raises(IllSorted):
        store.intern(or_sym(2), (a,))


def test_flip_clause_assignment():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    c = store.mk_or(store.mk_not(a), b)
    up = asg(c, True)
    assert flip(up) == asg(c, False)


def test_flip_involution():
    store = TermStore()
    l = store.mk_const("L", BOOL)
    a = asg(l, False)
    assert flip(flip(a)) == a
    assert flip(a).value != a.value
    assert flip(a).term is a.term


def test_flip_first_order_rejected():
    store = TermStore()
    x = store.mk_const("x", RAT)
    with pytest.raises(NotBoolean):
        flip(asg(x, 3))


def test_evaluate_connective():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    assert evaluate(store.mk_not(a), {a: BoolVal(True)}) == BoolVal(False)


def test_evaluate_rational_atom():
    store = TermStore()
    x = store.mk_const("x", RAT)
    y = store.mk_const("y", RAT)
    t = store.mk_le(store.mk_add(x, store.mk_numeral(1)), y)
    nu = {x: RatVal(Fraction(1)), y: RatVal(Fraction(3))}
    assert evaluate(t, nu) == BoolVal(True)  # exact: 2 <= 3


def test_evaluate_uninterpreted_application_needs_entry():
    store = TermStore()
    f = unary_f(store)
    a = store.mk_const("a", U)
    b = store.mk_const("b", U)
    t = store.mk_eq(store.mk_app(f, a), store.mk_app(f, b))
    from trailsmt.terms import AbsVal

    nu = {a: AbsVal(U, 0), b: AbsVal(U, 1)}
    assert evaluate(t, nu) is None


def test_evaluate_abs_equality():
    store = TermStore()
    from trailsmt.terms import AbsVal

    a = store.mk_const("a", U)
    b = store.mk_const("b", U)
    e = store.mk_eq(a, b)
    assert evaluate(e, {a: AbsVal(U, 0), b: AbsVal(U, 0)}) == BoolVal(True)
    assert evaluate(e, {a: AbsVal(U, 0), b: AbsVal(U, 1)}) == BoolVal(False)


def test_basis_subterm_closure():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    c = store.mk_or(a, b)
    p = problem_with(store, asg(c, True))
    assert relevant_basis(p) == [c, a, b]


def test_basis_subterm_walk_two_inputs():
    store = TermStore()
    x = store.mk_const("x", RAT)
    four = store.mk_numeral(4)
    e = store.mk_eq(x, four)
    p = problem_with(store, asg(x, 3), asg(e, True))
    assert relevant_basis(p) == [x, e, four]


def test_basis_grows_by_interning_order():
    store = TermStore()
    y = store.mk_const("y", RAT)
    z = store.mk_const("z", RAT)
    p = problem_with(store, asg(store.mk_lt(y, z), True))
    before = relevant_basis(p)
    new = store.mk_lt(z, y)
    after = relevant_basis(p)
    assert after == before + [new]


# -- property tests ----------------------------------------------------------

def _terms(store):
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    c = store.mk_const("C", BOOL)
    leaves = [a, b, c]
    return leaves


@st.composite
def term_shapes(draw, depth=3):
    """A shape is a nested tuple ('leaf', i) | (op, shapes...)."""
    if depth == 0:
        return ("leaf", draw(st.integers(0, 2)))
    kind = draw(
        st.sampled_from(["leaf", "not", "and", "or", "=>"])
    )
    if kind == "leaf":
        return ("leaf", draw(st.integers(0, 2)))
    if kind == "not":
        return ("not", draw(term_shapes(depth=depth - 1)))
    if kind == "=>":
        return (
            "=>",
            draw(term_shapes(depth=depth - 1)),
            draw(term_shapes(depth=depth - 1)),
        )
    n = draw(st.integers(2, 3))
    return (kind, *[draw(term_shapes(depth=depth - 1)) for _ in range(n)])


def _build(store, leaves, shape):
    if shape[0] == "leaf":
        return leaves[shape[1]]
    if shape[0] == "not":
        return store.mk_not(_build(store, leaves, shape[1]))
    args = [_build(store, leaves, s) for s in shape[1:]]
    if shape[0] == "and":
        return store.mk_and(*args)
    if shape[0] == "or":
        return store.mk_or(*args)
    return store.mk_implies(*args)


@given(term_shapes(), term_shapes())
def test_intern_idempotent_and_injective(s1, s2):
    store = TermStore()
    leaves = _terms(store)
    t1 = _build(store, leaves, s1)
    t1b = _build(store, leaves, s1)
    t2 = _build(store, leaves, s2)
    assert t1 is t1b
    assert (t1 is t2) == (s1 == s2) or (t1 is t2)
    # structurally equal iff identical node
    if t1.head == t2.head and t1.args == t2.args:
        assert t1 is t2


@given(term_shapes(), st.tuples(st.booleans(), st.booleans(), st.booleans()))
def test_evaluate_matches_direct_recursion(shape, bits):
    """Cross-check against a straight-line recursive evaluator."""
    store = TermStore()
    leaves = _terms(store)
    t = _build(store, leaves, shape)
    nu = {l: BoolVal(v) for l, v in zip(leaves, bits)}

    def direct(term):
        if term in nu:
            return nu[term].value
        name = term.head.name
        vals = [direct(a) for a in term.args]
        if name == "not":
            return not vals[0]
        if name == "and":
            return all(vals)
        if name == "or":
            return any(vals)
        return (not vals[0]) or vals[1]

    assert evaluate(t, nu) == BoolVal(direct(t))


@given(
    term_shapes(),
    st.tuples(st.booleans(), st.booleans(), st.booleans()),
    st.integers(0, 2),
)
def test_evaluate_monotone(shape, bits, hide):
    """Removing entries never changes a defined result (nu subset of nu')."""
    store = TermStore()
    leaves = _terms(store)
    t = _build(store, leaves, shape)
    full = {l: BoolVal(v) for l, v in zip(leaves, bits)}
    partial = dict(full)
    del partial[leaves[hide]]
    v = evaluate(t, partial)
    if v is not None:
        assert evaluate(t, full) == v
