"""Brute-force oracles: examples, permutation invariance, size guards."""

import random

import pytest

from trailsmt.oracle import TooLarge, lra_conjunction_oracle, oracle
from trailsmt.parser import parse
from trailsmt.terms import BOOL, RAT, TermStore
from helpers import asg, problem_with, unary_f, U


def test_oracle_bool_example():
    store = TermStore()
    a, b = store.mk_const("A", BOOL), store.mk_const("B", BOOL)
    p = problem_with(store, asg(store.mk_or(a, b), True), asg(a, False))
    assert oracle(p, "bool") == "sat"


def test_oracle_lra_example():
    store = TermStore()
    x = store.mk_const("x", RAT)
    p = problem_with(
        store,
        asg(store.mk_le(store.mk_numeral(1), x), True),
        asg(store.mk_le(x, store.mk_numeral(0)), True),
    )
    assert oracle(p, "lra") == "unsat"


def test_oracle_euf_example():
    store = TermStore()
    f = unary_f(store)
    a, b = store.mk_const("a", U), store.mk_const("b", U)
    p = problem_with(
        store,
        asg(store.mk_eq(a, b), True),
        asg(store.mk_eq(store.mk_app(f, a), store.mk_app(f, b)), False),
    )
    assert oracle(p, "euf") == "unsat"


def test_oracle_too_large():
    store = TermStore()
    ps = [store.mk_const(f"p{i}", BOOL) for i in range(9)]
    p = problem_with(store, *[asg(t, True) for t in ps])
    with pytest.raises(TooLarge):
        oracle(p, "bool")


def test_oracle_permutation_invariance():
    from trailsmt.gen import script_text

    rng = random.Random(3)
    for fam in ("bool", "lra", "euf"):
        for i in range(10):
            s = parse(script_text(fam, 23, i))
            base = oracle(s.problem, fam)
            perm = list(s.problem.inputs)
            rng.shuffle(perm)
            shuffled = problem_with(s.problem.store, *perm)
            shuffled.sorts = s.problem.sorts
            shuffled.symbols = s.problem.symbols
            assert oracle(shuffled, fam) == base


def test_conjunction_oracle_core():
    store = TermStore()
    x = store.mk_const("x", RAT)
    a1 = asg(store.mk_le(store.mk_numeral(1), x), True)
    a2 = asg(store.mk_le(x, store.mk_numeral(0)), True)
    free = asg(store.mk_le(x, store.mk_numeral(9)), True)
    verdict, core = lra_conjunction_oracle([free, a1, a2])
    assert verdict == "unsat"
    assert sorted(core) == [1, 2]  # minimized: the free bound is dropped
    verdict2, core2 = lra_conjunction_oracle([free, a1])
    assert (verdict2, core2) == ("sat", None)
