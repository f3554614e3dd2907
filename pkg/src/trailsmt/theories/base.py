"""Shared machinery for theory modules: views, inferences, candidate ranking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from fractions import Fraction

from ..terms import (
    Assignment,
    BoolVal,
    EUF_T,
    RatVal,
    Term,
    Value,
)
from ..trail import Trail, TrailItem

# Candidate priority tiers inside a module's infer scan. Clash-producing
# inferences (conclusion's flip already on the trail) outrank plain
# propagation, which outranks evaluation; within a tier the candidate with
# the lowest key (latest premise index, then conclusion term id) fires first.
TIER_EVAL = 0
TIER_PROP = 1
TIER_CLASH = 2


@dataclass(frozen=True)
class Inference:
    """premises |= conclusion in the module's theory; conclusion is Boolean."""

    module: str
    rule: str
    premises: tuple[Assignment, ...]
    conclusion: Assignment


@dataclass
class View:
    """The trail fragment a module understands, plus the term universes.

    ``items`` is the understood subsequence in trail order. ``universe`` is
    the full relevant basis (inference and evaluation targets, including
    later-interned explanation terms); ``decision_basis`` is the subterm
    closure of the inputs, the only terms decisions may target.
    """

    items: tuple[TrailItem, ...]
    universe: tuple[Term, ...]
    decision_basis: tuple[Term, ...]
    _by_term: dict[Term, TrailItem]

    @staticmethod
    def of(
        items: Sequence[TrailItem],
        universe: Sequence[Term],
        decision_basis: Optional[Sequence[Term]] = None,
    ) -> "View":
        if decision_basis is None:
            decision_basis = universe
        return View(
            tuple(items),
            tuple(universe),
            tuple(decision_basis),
            {it.term: it for it in items},
        )

    def item_of(self, term: Term) -> Optional[TrailItem]:
        return self._by_term.get(term)

    def value(self, term: Term) -> Optional[Value]:
        it = self._by_term.get(term)
        return None if it is None else it.value

    def index_of(self, term: Term) -> int:
        it = self._by_term.get(term)
        return -1 if it is None else it.index

    def assignments(self) -> list[Assignment]:
        return [it.assignment for it in self.items]


def build_view(
    module: "TheoryModule",
    trail: Trail,
    universe: Sequence[Term],
    decision_basis: Optional[Sequence[Term]] = None,
) -> View:
    return View.of(
        [it for it in trail.items if module.understands(it.assignment)],
        universe,
        decision_basis,
    )


@dataclass(frozen=True)
class Candidate:
    tier: int
    key: tuple
    inference: Inference


def pick_candidate(cands: list[Candidate]) -> Optional[Inference]:
    if not cands:
        return None
    best = min(cands, key=lambda c: (-c.tier, c.key))
    return best.inference


def premise_key(view: View, premises: Sequence[Assignment]) -> tuple:
    """Deterministic rank: latest premise trail index (: -1 when empty)."""
    return (max((view.index_of(p.term) for p in premises), default=-1),)


def premises_contradictory(premises: Sequence[Assignment]) -> bool:
    """Same term assigned two different values: entails anything."""
    seen: dict[Term, Value] = {}
    for p in premises:
        v = seen.get(p.term)
        if v is not None and v != p.value:
            return True
        seen[p.term] = p.value
    return False


def eval_support(
    t: Term, view: View, top: bool = True
) -> Optional[tuple[Value, tuple[Assignment, ...]]]:
    """Evaluate ``t`` from trail values, returning the premises used.

    Children consult their own trail assignment first (shallowest possible
    justification), recursing only when unassigned. The top term itself never
    self-justifies. Short-circuiting keeps `or`/`and` supports minimal: the
    first made-true disjunct alone supports a true `or`.
    """
    if not top:
        it = view.item_of(t)
        if it is not None:
            return it.value, (it.assignment,)
    head = t.head
    if head.numeral is not None:
        return RatVal(head.numeral), ()
    name = head.name
    if head.owner == EUF_T and name != "=":
        return None

    def rec(child: Term):
        return eval_support(child, view, top=False)

    if name == "not":
        r = rec(t.args[0])
        if r is None:
            return None
        v, prem = r
        assert isinstance(v, BoolVal)
        return BoolVal(not v.value), prem
    if name in ("and", "or"):
        want = name == "or"
        prems: list[Assignment] = []
        unknown = False
        for a in t.args:
            r = rec(a)
            if r is None:
                unknown = True
            elif r[0].value is want:  # type: ignore[union-attr]
                return BoolVal(want), r[1]
            else:
                prems.extend(r[1])
        if unknown:
            return None
        return BoolVal(not want), _dedupe(prems)
    if name == "=>":
        ra = rec(t.args[0])
        if ra is not None and ra[0].value is False:  # type: ignore[union-attr]
            return BoolVal(True), ra[1]
        rb = rec(t.args[1])
        if rb is not None and rb[0].value is True:  # type: ignore[union-attr]
            return BoolVal(True), rb[1]
        if ra is None or rb is None:
            return None
        return BoolVal(False), _dedupe(list(ra[1]) + list(rb[1]))
    if name == "=":
        ra, rb = rec(t.args[0]), rec(t.args[1])
        if ra is None or rb is None:
            return None
        return BoolVal(ra[0] == rb[0]), _dedupe(list(ra[1]) + list(rb[1]))
    if name in ("<", "<="):
        ra, rb = rec(t.args[0]), rec(t.args[1])
        if ra is None or rb is None:
            return None
        va, vb = ra[0], rb[0]
        assert isinstance(va, RatVal) and isinstance(vb, RatVal)
        ok = va.value < vb.value if name == "<" else va.value <= vb.value
        return BoolVal(ok), _dedupe(list(ra[1]) + list(rb[1]))
    if name in ("+", "-", "*"):
        vals: list[Fraction] = []
        prems = []
        for a in t.args:
            r = rec(a)
            if r is None:
                return None
            v = r[0]
            assert isinstance(v, RatVal)
            vals.append(v.value)
            prems.extend(r[1])
        if name == "+":
            out = sum(vals, Fraction(0))
        elif name == "-":
            out = -vals[0] if len(vals) == 1 else vals[0] - vals[1]
        else:
            out = vals[0] * vals[1]
        return RatVal(out), _dedupe(prems)
    return None


def _dedupe(prems: Sequence[Assignment]) -> tuple[Assignment, ...]:
    seen: set[int] = set()
    out = []
    for p in prems:
        if p.term.id not in seen:
            seen.add(p.term.id)
            out.append(p)
    return tuple(out)


class TheoryModule:
    """Interface implemented by each theory. Modules are stateless between
    calls; closures and interval tables are rebuilt per call."""

    name: str = "?"

    def understands(self, a: Assignment) -> bool:
        raise NotImplementedError

    def infer(self, view: View) -> Optional[Inference]:
        raise NotImplementedError

    def decide(self, view: View) -> Optional[Assignment]:
        raise NotImplementedError

    def explain_undo(
        self, view: View, conflict: Sequence[Assignment], decision: Assignment
    ) -> list[Inference]:
        return []

    def check(self, premises: Sequence[Assignment], conclusion: Assignment) -> bool:
        """Re-derive premises |= conclusion independently of solver state."""
        raise NotImplementedError
