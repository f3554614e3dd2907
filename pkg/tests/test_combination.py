"""Cross-theory behavior outside the generated families: predicates,
Boolean equality, uninterpreted functions over Real, deep formulas."""

import pytest

from trailsmt.kernel import Config, solve
from trailsmt.parser import parse
from trailsmt.proofs import check

CASES = [
    # predicate congruence
    (
        """(declare-sort U 0)(declare-const a U)(declare-const b U)
           (declare-fun p (U) Bool)
           (assert (p a))(assert (not (p b)))(assert (= a b))(check-sat)""",
        "unsat",
    ),
    # Boolean equality over constants
    (
        """(declare-const x Bool)(declare-const y Bool)
           (assert (= x y))(assert x)(assert (not y))(check-sat)""",
        "unsat",
    ),
    # Boolean equality over compounds
    (
        """(declare-const a Bool)(declare-const b Bool)
           (assert (= (and a b) (or a b)))(assert a)(assert (not b))(check-sat)""",
        "unsat",
    ),
    (
        """(declare-const a Bool)(declare-const b Bool)
           (assert (= (and a b) (or a b)))(check-sat)""",
        "sat",
    ),
    # congruence across the arithmetic sort
    (
        """(declare-const x Real)(declare-const y Real)(declare-fun f (Real) Real)
           (assert (= x y))(assert (< (f x) (f y)))(check-sat)""",
        "unsat",
    ),
    (
        """(declare-const x Real)(declare-const y Real)(declare-fun f (Real) Real)
           (assert (= x y))(assert (<= (f x) (f y)))(check-sat)""",
        "sat",
    ),
    # value assignments force a congruence merge
    (
        """(declare-const x Real)(declare-const y Real)(declare-fun g (Real) Real)
           (assign x 2)(assign y 2)(assert (< (g x) (g y)))(check-sat)""",
        "unsat",
    ),
    # chained implication
    (
        """(declare-const a Bool)(declare-const b Bool)(declare-const c Bool)
           (assert (=> a b c))(assert a)(assert b)(assert (not c))(check-sat)""",
        "unsat",
    ),
    # non-clausal structure
    (
        """(declare-const a Bool)(declare-const b Bool)
           (assert (and (or a b) (not (and a b))))(check-sat)""",
        "sat",
    ),
    # the classic f^3 = id, f^5 = id forces f = id
    (
        """(declare-sort U 0)(declare-const a U)(declare-fun f (U) U)
           (assert (= (f (f (f a))) a))
           (assert (= (f (f (f (f (f a))))) a))
           (assert (not (= (f a) a)))(check-sat)""",
        "unsat",
    ),
    # same equations, consistent query
    (
        """(declare-sort U 0)(declare-const a U)(declare-fun f (U) U)
           (assert (= (f (f (f a))) a))
           (assert (= (f (f (f (f (f a))))) a))
           (assert (= (f a) a))(check-sat)""",
        "sat",
    ),
    # arithmetic feeding equalities feeding congruence
    (
        """(declare-const x Real)(declare-const y Real)(declare-fun h (Real) Real)
           (assert (<= x y))(assert (<= y x))
           (assert (not (= (h x) (h y))))(check-sat)""",
        "unsat",
    ),
]


@pytest.mark.parametrize("text,want", CASES)
def test_combined_theories(text, want):
    script = parse(text)
    v = solve(script.problem, Config(proof_mode="proof-terms", debug_checks=True))
    assert v.status == want
    if want == "unsat":
        assert check(v.refutation, script.problem).ok
