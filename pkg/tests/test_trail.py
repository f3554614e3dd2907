"""Trail: levels, restriction, queries, conflict container."""

import pytest
from hypothesis import given, strategies as st

from trailsmt.terms import BOOL, RAT, TermStore
from trailsmt.trail import (
    ConflictState,
    EmptyConflict,
    JustificationOutOfRange,
    TermAlreadyAssigned,
    Trail,
)
from helpers import asg


def _consts(store, n, sort=BOOL, prefix="p"):
    return [store.mk_const(f"{prefix}{i}", sort) for i in range(n)]


def test_first_decision_level():
    store = TermStore()
    (a,) = _consts(store, 1)
    t = Trail()
    item = t.append_decision(asg(a, True), "Bool")
    assert item.level == 1


def test_decision_level_law():
    store = TermStore()
    ps = _consts(store, 3)
    x = store.mk_const("x", RAT)
    t = Trail()
    t.append_decision(asg(ps[0], True), "Bool")
    t.append_decision(asg(ps[1], True), "Bool")
    assert t.max_level() == 2
    item = t.append_decision(asg(x, 5), "LRA")
    assert item.level == 3


def test_deduction_level_is_max_of_justification():
    store = TermStore()
    ps = _consts(store, 4)
    t = Trail()
    t.append_input(asg(ps[0], True))  # level 0
    t.append_decision(asg(ps[1], True), "Bool")  # level 1
    t.append_decision(asg(ps[2], True), "Bool")  # level 2
    item = t.append_deduction(asg(ps[3], True), "Bool", "unit", (0, 2))
    assert item.level == 2


def test_append_rejects_reassignment():
    store = TermStore()
    (a,) = _consts(store, 1)
    t = Trail()
    t.append_input(asg(a, True))
    with pytest.raises(TermAlreadyAssigned):
        t.append_decision(asg(a, False), "Bool")


def test_append_rejects_dangling_justification():
    store = TermStore()
    a, b = _consts(store, 2)
    t = Trail()
    t.append_input(asg(a, True))
    with pytest.raises(JustificationOutOfRange):
        t.append_deduction(asg(b, True), "Bool", "unit", (5,))


def test_restrict_drops_by_level():
    store = TermStore()
    ps = _consts(store, 4)
    t = Trail()
    t.append_input(asg(ps[0], True))
    t.append_decision(asg(ps[1], True), "Bool")
    t.append_deduction(asg(ps[2], True), "Bool", "unit", (1,))
    t.append_decision(asg(ps[3], True), "Bool")
    r = t.restrict_to(1)
    assert [it.term for it in r] == [ps[0], ps[1], ps[2]]
    r.check_wellformed()


def test_restrict_keeps_late_low_level_deduction():
    store = TermStore()
    ps = _consts(store, 4)
    t = Trail()
    t.append_input(asg(ps[0], True))
    t.append_decision(asg(ps[1], True), "Bool")
    t.append_decision(asg(ps[2], True), "Bool")
    late = t.append_deduction(asg(ps[3], True), "Bool", "unit", (0,))
    assert late.level == 0
    r = t.restrict_to(0)
    assert [it.term for it in r] == [ps[0], ps[3]]
    assert r.items[1].justification == (0,)


def test_restrict_to_max_level_is_identity():
    store = TermStore()
    ps = _consts(store, 3)
    t = Trail()
    t.append_input(asg(ps[0], True))
    t.append_decision(asg(ps[1], True), "Bool")
    t.append_deduction(asg(ps[2], True), "Bool", "unit", (1,))
    r = t.restrict_to(t.max_level())
    assert [(it.term, it.level, it.justification) for it in r] == [
        (it.term, it.level, it.justification) for it in t
    ]


def test_query_flip_present():
    store = TermStore()
    (l,) = _consts(store, 1, prefix="L")
    t = Trail()
    t.append_input(asg(l, True))
    assert t.flip_present(asg(l, False))
    assert not t.flip_present(asg(l, True))


def test_query_lookup_unassigned():
    store = TermStore()
    a, b = _consts(store, 2)
    t = Trail()
    t.append_input(asg(a, True))
    assert t.lookup(b) is None


def test_latest_in_max_index():
    assert Trail.latest_in({2, 5, 3}) == 5
    with pytest.raises(EmptyConflict):
        Trail.latest_in(set())


def test_conflict_state_level():
    store = TermStore()
    ps = _consts(store, 3)
    t = Trail()
    t.append_input(asg(ps[0], True))
    t.append_decision(asg(ps[1], True), "Bool")
    t.append_decision(asg(ps[2], True), "Bool")
    e = ConflictState.of(t, {0, 2})
    assert e.level == 2
    e.elems.discard(2)
    e.recompute_level(t)
    assert e.level == 0


# -- properties ---------------------------------------------------------------

@st.composite
def random_trail_script(draw):
    """Sequence of appends: ('d',) decision | ('x', k) deduction with k
    justification picks."""
    return draw(
        st.lists(
            st.one_of(
                st.just(("d",)),
                st.tuples(st.just("x"), st.integers(0, 3)),
            ),
            min_size=1,
            max_size=12,
        )
    )


def _materialize(script):
    store = TermStore()
    t = Trail()
    names = 0
    t.append_input(asg(store.mk_const("i0", BOOL), True))
    for step in script:
        names += 1
        term = store.mk_const(f"t{names}", BOOL)
        if step[0] == "d":
            t.append_decision(asg(term, True), "Bool")
        else:
            n = len(t.items)
            just = sorted({(step[1] * 7 + j) % n for j in range(step[1])})
            t.append_deduction(asg(term, True), "Bool", "unit", just)
    return t


@given(random_trail_script())
def test_level_laws_hold(script):
    t = _materialize(script)
    t.check_wellformed()


@given(random_trail_script(), st.integers(0, 4), st.integers(0, 4))
def test_restrict_composes_as_min(script, m1, m2):
    t = _materialize(script)
    a = t.restrict_to(m1).restrict_to(m2)
    b = t.restrict_to(min(m1, m2))
    assert [(it.term, it.level, it.kind) for it in a] == [
        (it.term, it.level, it.kind) for it in b
    ]


@given(random_trail_script())
def test_justification_closure(script):
    t = _materialize(script)
    for item in t:
        for j in item.justification:
            assert j < item.index
            assert t.items[j].level <= item.level
