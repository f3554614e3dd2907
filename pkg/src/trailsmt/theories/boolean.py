"""Propositional module: connective evaluation, clause unit propagation,
default-phase decisions.

Clause literals are peeled through top-level negations, so a clause
``(or (not A) B)`` propagates on the atoms A and B directly; a non-`or`
Boolean assignment acts as a unit clause (which is where ``(not A)<-true``
yields ``A<-false``).
"""

from __future__ import annotations

from itertools import product
from typing import Optional, Sequence

from ..terms import (
    Assignment,
    BOOL_T,
    BoolVal,
    Term,
    TermStore,
    evaluate,
    subterms,
)
from .base import (
    Candidate,
    Inference,
    TIER_CLASH,
    TIER_EVAL,
    TIER_PROP,
    TheoryModule,
    View,
    eval_support,
    pick_candidate,
    premise_key,
    premises_contradictory,
)

_CONNECTIVES = ("not", "and", "or", "=>")


def peel(term: Term) -> tuple[Term, bool]:
    """Strip top-level negations: returns (atom, polarity)."""
    pol = True
    while term.head.name == "not" and term.head.owner == BOOL_T:
        term = term.args[0]
        pol = not pol
    return term, pol


class BoolModule(TheoryModule):
    name = BOOL_T

    def __init__(self, store: TermStore) -> None:
        self.store = store

    def understands(self, a: Assignment) -> bool:
        return a.is_boolean

    # -- inference ---------------------------------------------------------

    def infer(self, view: View) -> Optional[Inference]:
        cands: list[Candidate] = []
        self._eval_candidates(view, cands)
        self._clause_candidates(view, cands)
        return pick_candidate(cands)

    def _wants(self, view: View, term: Term, value: BoolVal) -> Optional[int]:
        """Tier for concluding term<-value, or None if already there."""
        cur = view.value(term)
        if cur is None:
            return TIER_PROP
        return TIER_CLASH if cur != value else None

    def _eval_candidates(self, view: View, cands: list[Candidate]) -> None:
        for t in view.universe:
            if not t.sort.is_bool or t.head.name not in _CONNECTIVES:
                continue
            r = eval_support(t, view)
            if r is None:
                continue
            v, prems = r
            assert isinstance(v, BoolVal)
            tier = self._wants(view, t, v)
            if tier is None:
                continue
            tier = TIER_CLASH if tier == TIER_CLASH else TIER_EVAL
            inf = Inference(self.name, "eval", prems, Assignment(t, v))
            cands.append(Candidate(tier, premise_key(view, prems) + (t.id,), inf))

    def _clause_candidates(self, view: View, cands: list[Candidate]) -> None:
        for item in view.items:
            c = item.term
            cval = item.value
            assert isinstance(cval, BoolVal)
            if c.head.name == "not":
                # unit clause through negation, both polarities
                atom, pol = peel(c)
                forced = BoolVal(cval.value is pol)
                tier = self._wants(view, atom, forced)
                if tier is not None:
                    inf = Inference(
                        self.name, "neg", (item.assignment,), Assignment(atom, forced)
                    )
                    cands.append(
                        Candidate(tier, (item.index, atom.id), inf)
                    )
                continue
            if c.head.name != "or" or cval.value is not True:
                continue
            # c = (or l1 ... ln) asserted true: unit propagation
            falsifiers: list[Assignment] = []
            unassigned: list[tuple[Term, bool]] = []
            lits_seen: set[tuple[int, bool]] = set()
            satisfied = False
            for lit in c.args:
                atom, pol = peel(lit)
                if (atom.id, pol) in lits_seen:
                    continue
                lits_seen.add((atom.id, pol))
                av = view.value(atom)
                if av is None:
                    unassigned.append((atom, pol))
                elif av.value is pol:  # type: ignore[union-attr]
                    satisfied = True
                    break
                else:
                    falsifiers.append(view.item_of(atom).assignment)
            if satisfied:
                continue
            if len(unassigned) == 1:
                atom, pol = unassigned[0]
                prems = (item.assignment, *falsifiers)
                inf = Inference(
                    self.name, "unit", prems, Assignment(atom, BoolVal(pol))
                )
                cands.append(
                    Candidate(TIER_PROP, premise_key(view, prems) + (atom.id,), inf)
                )
            elif not unassigned and falsifiers:
                # fully falsified: conclude the forcing assignment of the
                # latest falsified literal; its flip is on the trail
                latest = max(falsifiers, key=lambda a: view.index_of(a.term))
                atom = latest.term
                assert isinstance(latest.value, BoolVal)
                others = tuple(a for a in falsifiers if a is not latest)
                prems = (item.assignment, *others)
                inf = Inference(
                    self.name,
                    "unit",
                    prems,
                    Assignment(atom, BoolVal(not latest.value.value)),
                )
                cands.append(
                    Candidate(TIER_CLASH, premise_key(view, prems) + (atom.id,), inf)
                )

    # -- decisions ----------------------------------------------------------

    def decide(self, view: View) -> Optional[Assignment]:
        for t in view.decision_basis:
            if not t.sort.is_bool or t.head.owner == BOOL_T:
                continue  # connective-headed terms take values by evaluation
            if view.value(t) is None:
                return Assignment(t, BoolVal(True))
        return None

    # -- checking ------------------------------------------------------------

    def check(self, premises: Sequence[Assignment], conclusion: Assignment) -> bool:
        """Truth-table entailment over the peeled Boolean atoms."""
        if not conclusion.is_boolean:
            return False
        if premises_contradictory(premises):
            return True
        bool_premises = [p for p in premises if p.is_boolean]
        atoms: list[Term] = []
        seen: set[int] = set()
        for a in [*bool_premises, conclusion]:
            for t in subterms(a.term):
                if t.sort.is_bool and t.head.name not in _CONNECTIVES:
                    if t.id not in seen:
                        seen.add(t.id)
                        atoms.append(t)
        if len(atoms) > 16:
            return False  # refuse rather than enumerate 2^17+ rows
        for bits in product((False, True), repeat=len(atoms)):
            nu = {t: BoolVal(b) for t, b in zip(atoms, bits)}
            if any(evaluate(p.term, nu) != p.value for p in bool_premises):
                continue
            if evaluate(conclusion.term, nu) != conclusion.value:
                return False
        return True
