"""Proof terms, checker, resolution export, LCF kernel."""

import io
import random

import pytest

from trailsmt.kernel import Config, Solver, solve
from trailsmt.proofs import (
    Entails,
    LcfError,
    LcfKernel,
    MalformedNode,
    PInput,
    ProofStore,
    Thm,
    UnsatSet,
    check,
)
from trailsmt.proofio import (
    export_resolution,
    read_proof,
    read_resolution,
    write_proof,
    write_resolution,
    check_resolution,
)
from trailsmt.terms import BOOL, RAT, TermStore
from trailsmt.theories import default_modules
from helpers import asg, problem_with
from mutate import random_mutation


def _modules(store):
    return {m.name: m for m in default_modules(store)}


def _clause_setup():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    b = store.mk_const("B", BOOL)
    c1 = store.mk_or(store.mk_not(a), b)
    c2 = store.mk_or(store.mk_not(a), store.mk_not(b))
    return store, a, b, c1, c2


def test_construct_thy_node():
    store, a, b, c1, _ = _clause_setup()
    ps = ProofStore(_modules(store))
    node = ps.thy_node("Bool", "unit", (asg(c1, True), asg(a, True)), asg(b, True))
    assert node.concl == Entails(frozenset({asg(c1, True), asg(a, True)}), asg(b, True))
    assert ps.thy_node("Bool", "unit", (asg(a, True), asg(c1, True)), asg(b, True)) is node


def test_construct_thy_node_rejects_invalid():
    store, a, b, c1, _ = _clause_setup()
    ps = ProofStore(_modules(store))
    with pytest.raises(MalformedNode):
        ps.thy_node("Bool", "unit", (asg(c1, True),), asg(b, True))


def test_construct_res_and_entail():
    store, a, b, c1, c2 = _clause_setup()
    ps = ProofStore(_modules(store))
    n1 = ps.thy_node("Bool", "unit", (asg(c1, True), asg(a, True)), asg(b, True))
    n2 = ps.thy_node("Bool", "unit", (asg(c2, True), asg(a, True)), asg(b, False))
    clash = ps.clash_node(n2, asg(b, True))
    assert clash.concl == UnsatSet(
        frozenset({asg(c2, True), asg(a, True), asg(b, True)})
    )
    res = ps.res_node(asg(b, True), clash, n1)
    assert res.concl == UnsatSet(
        frozenset({asg(c1, True), asg(c2, True), asg(a, True)})
    )
    ent = ps.entail_node(asg(a, True), res)
    assert ent.concl == Entails(
        frozenset({asg(c1, True), asg(c2, True)}), asg(a, False)
    )


def test_construct_res_rejects_bad_pivot():
    store, a, b, c1, c2 = _clause_setup()
    ps = ProofStore(_modules(store))
    n1 = ps.thy_node("Bool", "unit", (asg(c1, True), asg(a, True)), asg(b, True))
    n2 = ps.thy_node("Bool", "unit", (asg(c2, True), asg(a, True)), asg(b, False))
    clash = ps.clash_node(n2, asg(b, True))
    with pytest.raises(MalformedNode):
        ps.res_node(asg(b, False), clash, n1)  # pivot not in the left set


def test_check_accepts_end_to_end_refutation():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True), asg(store.mk_not(a), True))
    v = solve(p, Config())
    assert v.status == "unsat"
    rep = check(v.refutation, p)
    assert rep.ok and rep.nodes_checked >= 2


def test_check_rejects_mutations_deterministically():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True), asg(store.mk_not(a), True))
    v = solve(p, Config())
    rng = random.Random(0)
    for _ in range(25):
        kind, mutated = random_mutation(v.refutation, rng)
        rep = check(mutated, p)
        assert not rep.ok, kind


def test_check_rejects_invalid_theory_step():
    from helpers import U

    store = TermStore()
    a, b, c = (store.mk_const(n, U) for n in "abc")
    eab, eac = store.mk_eq(a, b), store.mk_eq(a, c)
    p = problem_with(store, asg(eab, True))
    # hand-build an unjustified transitivity claim
    bad = PInput(0, asg(eab, True), Entails(frozenset({asg(eab, True)}), asg(eab, True)))
    from trailsmt.proofs import PThy, PClash

    thy = PThy(
        "EUF",
        "cc",
        (asg(eab, True),),
        asg(eac, True),
        Entails(frozenset({asg(eab, True)}), asg(eac, True)),
    )
    rep = check(thy, p)
    assert not rep.ok
    assert "re-derivation" in rep.reason


def test_resolution_export_counts_for_negation_pair():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True), asg(store.mk_not(a), True))
    v = solve(p, Config())
    rp = export_resolution(v.refutation, p)
    kinds = [c.kind for c in rp.clauses]
    assert kinds.count("u") == 2
    assert kinds.count("l") == 1
    assert kinds.count("r") == 2
    assert rp.replay()
    assert rp.clauses[rp.final].lits == frozenset()


def test_resolution_export_propositional_has_no_hyps():
    store, a, b, c1, c2 = _clause_setup()
    na = store.mk_not(a)
    p = problem_with(store, asg(c1, True), asg(c2, True), asg(a, True))
    v = solve(p, Config())
    assert v.status == "unsat"
    rp = export_resolution(v.refutation, p)
    assert all(not c.hyps for c in rp.clauses)
    assert not rp.global_hyps
    assert rp.replay()


def test_resolution_export_value_input_global_hypothesis():
    store = TermStore()
    x = store.mk_const("x", RAT)
    e = store.mk_eq(x, store.mk_numeral(4))
    p = problem_with(store, asg(x, 3), asg(e, True))
    v = solve(p, Config())
    rp = export_resolution(v.refutation, p)
    assert rp.global_hyps == (asg(x, 3),)
    lemma = [c for c in rp.clauses if c.kind == "l"]
    assert lemma and lemma[0].hyps == (asg(x, 3),)
    assert rp.replay()


def test_proof_file_roundtrip():
    store, a, b, c1, c2 = _clause_setup()
    p = problem_with(store, asg(c1, True), asg(c2, True), asg(a, True))
    v = solve(p, Config())
    text = write_proof(v.refutation, p)
    # a fresh, structurally identical problem
    store2, a2, b2, d1, d2 = _clause_setup()
    p2 = problem_with(store2, asg(d1, True), asg(d2, True), asg(a2, True))
    root2 = read_proof(text, p2)
    assert check(root2, p2).ok
    assert write_proof(root2, p2) == text


def test_resolution_file_roundtrip():
    store, a, b, c1, c2 = _clause_setup()
    p = problem_with(store, asg(c1, True), asg(c2, True), asg(a, True))
    v = solve(p, Config())
    rp = export_resolution(v.refutation, p)
    text = write_resolution(rp)
    rp2 = read_resolution(text, p)
    assert rp2.replay()
    assert check_resolution(rp2, p).ok
    assert write_resolution(rp2) == text


def test_conclusion_recomputation_property():
    """Stored conclusions equal recomputed ones on solver-built proofs."""
    from trailsmt.gen import script_text
    from trailsmt.parser import parse

    seen = 0
    for i in range(40):
        s = parse(script_text("bool", 21, i))
        v = solve(s.problem, Config())
        if v.status != "unsat":
            continue
        seen += 1
        assert check(v.refutation, s.problem).ok
    assert seen > 5


# -- LCF ------------------------------------------------------------------------

def test_lcf_axiom():
    store = TermStore()
    a = store.mk_const("A", BOOL)
    p = problem_with(store, asg(a, True))
    k = LcfKernel(p, _modules(store))
    thm = k.axiom(0)
    assert thm.concl == Entails(frozenset({asg(a, True)}), asg(a, True))


def test_lcf_refuses_bad_resolve():
    store, a, b, c1, c2 = _clause_setup()
    p = problem_with(store, asg(c1, True), asg(c2, True))
    k = LcfKernel(p, _modules(store))
    n1 = k.thy("Bool", "unit", (asg(c1, True), asg(a, True)), asg(b, True))
    n2 = k.thy("Bool", "unit", (asg(c2, True), asg(a, True)), asg(b, False))
    clash = k.clash(n2, asg(b, True))
    with pytest.raises(LcfError):
        k.resolve(asg(b, False), clash, n1)


def test_lcf_refuses_unsound_theory_step():
    store, a, b, c1, _ = _clause_setup()
    p = problem_with(store, asg(c1, True))
    k = LcfKernel(p, _modules(store))
    with pytest.raises(LcfError):
        k.thy("Bool", "unit", (asg(c1, True),), asg(b, True))


def test_lcf_thm_not_constructible_outside_kernel():
    with pytest.raises(LcfError):
        Thm(UnsatSet(frozenset()))


def test_lcf_mode_end_to_end():
    store, a, b, c1, c2 = _clause_setup()
    p = problem_with(store, asg(c1, True), asg(c2, True), asg(a, True))
    v = solve(p, Config(proof_mode="lcf"))
    assert v.status == "unsat"
    assert isinstance(v.refutation, Thm)
    assert isinstance(v.refutation.concl, UnsatSet)
    assert v.refutation.concl.elems <= set(p.inputs)
    # identical verdict to proof-terms mode on the same inputs
    store2, a2, b2, d1, d2 = _clause_setup()
    p2 = problem_with(store2, asg(d1, True), asg(d2, True), asg(a2, True))
    assert solve(p2, Config(proof_mode="proof-terms")).status == "unsat"


def test_lcf_live_counter_contract():
    from trailsmt.gen import script_text
    from trailsmt.parser import parse
    from trailsmt.kernel import _LcfBuilder

    for fam in ("bool", "lra", "euf"):
        for i in range(15):
            s = parse(script_text(fam, 13, i))
            solver = Solver(s.problem, Config(proof_mode="lcf"))
            solver.run()
            assert isinstance(solver.builder, _LcfBuilder)
            for live, trail_len, esize in solver.builder.samples:
                assert live <= trail_len + esize
