"""Kernel: the search loop, conflict rules, model extraction, guards."""

import io
from fractions import Fraction

from trailsmt.kernel import Config, Solver, solve
from trailsmt.proofs import check
from trailsmt.terms import AbsVal, BOOL, BoolVal, RAT, RatVal, TermStore
from helpers import asg, problem_with, U


def _trace_rules(trace: str) -> list[str]:
    return [line.split("\t")[1] for line in trace.splitlines()]


def test_solve_negation_pair_unsat():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True), asg(store.mk_not(a), True))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "unsat"
    assert set(v.core) == {asg(a, True), asg(store.mk_not(a), True)}
    assert check(v.refutation, p).ok


def test_solve_unit_propagation_sat():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    c = store.mk_or(a, b)
    p = problem_with(store, asg(c, True), asg(a, False))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "sat"
    assert v.model[b] == BoolVal(True)


def test_solve_value_vs_constant_mismatch():
    store = TermStore()
    x = store.mk_const("x", RAT)
    e = store.mk_eq(x, store.mk_numeral(4))
    p = problem_with(store, asg(x, 3), asg(e, True))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "unsat"
    assert set(v.core) == {asg(x, 3), asg(e, True)}
    rep = check(v.refutation, p)
    assert rep.ok


def test_cdcl_conflict_run():
    """Two clauses, decide A, propagate, resolve on B, backjump to level 0."""
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    c1 = store.mk_or(store.mk_not(a), b)
    c2 = store.mk_or(store.mk_not(a), store.mk_not(b))
    p = problem_with(store, asg(c1, True), asg(c2, True))
    tr = io.StringIO()
    v = solve(p, Config(trace=tr, debug_checks=True))
    assert v.status == "sat"
    assert v.model[a] == BoolVal(False)
    lines = tr.getvalue().splitlines()
    rules = _trace_rules(tr.getvalue())
    assert rules[:5] == ["decide", "deduce", "conflict", "resolve", "backjump"]
    assert "A<-true" in lines[0]
    assert "B<-true" in lines[1]
    assert "B<-true" in lines[3]  # resolve pivot
    learned = lines[4].split("\t")
    assert learned[3] == "A<-false" and learned[4] == "0"


def test_undo_clear_rule():
    """First-order decision undone, FM resolvent replayed, then Fail."""
    store = TermStore()
    y, x, z = (store.mk_const(n, RAT) for n in "yxz")
    p = problem_with(
        store,
        asg(store.mk_lt(y, x), True),
        asg(store.mk_lt(x, z), True),
        asg(y, 0),
        asg(z, 0),
    )
    tr = io.StringIO()
    solver = Solver(p, Config(trace=tr, debug_checks=True))
    assert solver._push_inputs() is None
    solver.trail.append_decision(asg(x, 5), "LRA")
    verdict = None
    while verdict is None:
        if solver.conflict is not None:
            verdict = solver._analyze_conflict()
        else:
            verdict = solver._search_step()
    assert verdict.status == "unsat"
    rules = _trace_rules(tr.getvalue())
    assert "undo" in rules
    undo_line = tr.getvalue().splitlines()[rules.index("undo")].split("\t")
    assert undo_line[3] == "x<-5"
    assert rules[-1] == "fail"
    assert set(verdict.core) <= set(p.inputs)
    assert check(verdict.refutation, p).ok


def test_solve_same_inputs_reaches_unsat_directly():
    """Through the normal loop the FM clash fires at level 0 before any
    decision is possible."""
    store = TermStore()
    y, x, z = (store.mk_const(n, RAT) for n in "yxz")
    p = problem_with(
        store,
        asg(store.mk_lt(y, x), True),
        asg(store.mk_lt(x, z), True),
        asg(y, 0),
        asg(z, 0),
    )
    tr = io.StringIO()
    v = solve(p, Config(trace=tr, debug_checks=True))
    assert v.status == "unsat"
    assert "decide" not in _trace_rules(tr.getvalue())


def test_fail_conflict_is_input_subset():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    p = problem_with(
        store,
        asg(store.mk_or(a, b), True),
        asg(store.mk_not(a), True),
        asg(store.mk_not(b), True),
    )
    v = solve(p, Config(debug_checks=True))
    assert v.status == "unsat"
    assert set(v.core) <= set(p.inputs)


def test_extract_model_single_atom():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "sat"
    assert v.model[a] == BoolVal(True)


def test_extract_model_distinct_abs_values():
    store = TermStore()
    a, b = store.mk_const("a", U), store.mk_const("b", U)
    p = problem_with(store, asg(store.mk_eq(a, b), False))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "sat"
    assert v.model[a] == AbsVal(U, 0)
    assert v.model[b] == AbsVal(U, 1)


def test_extract_model_integer_preference():
    store = TermStore()
    x = store.mk_const("x", RAT)
    p = problem_with(store, asg(store.mk_lt(store.mk_numeral(0), x), True))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "sat"
    assert v.model[x] == RatVal(Fraction(1))


def test_duplicate_conflicting_boolean_inputs():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True), asg(a, False))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "unsat"
    assert check(v.refutation, p).ok


def test_duplicate_conflicting_value_inputs():
    store = TermStore()
    x = store.mk_const("x", RAT)
    p = problem_with(store, asg(x, 3), asg(x, 4))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "unsat"
    assert check(v.refutation, p).ok
    a, b = store.mk_const("a", U), store.mk_const("b", U)
    p2 = problem_with(store, asg(a, AbsVal(U, 0)), asg(a, AbsVal(U, 1)))
    v2 = solve(p2, Config(debug_checks=True))
    assert v2.status == "unsat"
    assert check(v2.refutation, p2).ok


def test_duplicate_consistent_input_is_kept_once():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True), asg(a, True))
    v = solve(p, Config(debug_checks=True))
    assert v.status == "sat"


def test_step_limit_unknown():
    store = TermStore()
    ps = [store.mk_const(f"p{i}", BOOL) for i in range(6)]
    p = problem_with(store, *[asg(store.mk_or(ps[i], ps[i + 1]), True) for i in range(5)])
    v = solve(p, Config(max_steps=2))
    assert v.status == "unknown"
    assert v.reason == "step-limit"


def test_determinism_bitwise_replay():
    from trailsmt.gen import script_text
    from trailsmt.parser import parse
    from trailsmt.proofio import write_proof

    for fam in ("bool", "lra", "euf"):
        for i in range(5):
            outs = []
            for _ in range(2):
                s = parse(script_text(fam, 9, i))
                tr = io.StringIO()
                v = solve(s.problem, Config(trace=tr))
                proof = (
                    write_proof(v.refutation, s.problem)
                    if v.status == "unsat"
                    else ""
                )
                outs.append((v.status, tr.getvalue(), proof))
            assert outs[0] == outs[1]


def test_endorsement_check_configurable():
    from trailsmt.theories.blackbox import lra_oracle_modules

    store = TermStore()
    x, y = store.mk_const("x", RAT), store.mk_const("y", RAT)
    p = problem_with(store, asg(store.mk_lt(x, y), True))
    cfg = Config(
        check_endorsement=False,
        module_factory=lambda pr: lra_oracle_modules(pr.store),
    )
    v = solve(p, cfg)
    assert v.status == "sat"  # partial model: no native LRA decisions


def test_mode_agreement_smoke():
    from trailsmt.gen import script_text
    from trailsmt.parser import parse

    for fam in ("bool", "lra", "euf"):
        for i in range(10):
            verdicts = []
            for mode in ("none", "proof-terms", "lcf"):
                s = parse(script_text(fam, 3, i))
                verdicts.append(solve(s.problem, Config(proof_mode=mode)).status)
            assert len(set(verdicts)) == 1
