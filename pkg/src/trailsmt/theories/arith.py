"""Linear rational arithmetic module.

Inference is evaluation of fully-assigned atoms plus bound-clash explanation:
when the unit bounds on a variable close to an empty interval, the module
concludes the Fourier-Motzkin resolvent of the two defining bound atoms
(interning the new atom if needed). Decisions pick a rational inside the
current solution interval, preferring an integer, else the midpoint, and
dodge finitely many disequality exclusions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from ..linarith import (
    Constraint,
    LinExpr,
    EQ,
    LE,
    LT,
    NE,
    NonLinear,
    atom_constraint,
    combine_bounds,
    fm_satisfiable,
    render_constraint,
    value_constraint,
)
from ..terms import (
    Assignment,
    BoolVal,
    LRA_T,
    RatVal,
    Term,
    TermStore,
)
from ..trail import TrailItem
from .base import (
    Inference,
    TIER_CLASH,
    TIER_EVAL,
    TIER_PROP,
    TheoryModule,
    View,
    eval_support,
    premise_key,
    premises_contradictory,
)

def _is_lra_atom(t: Term) -> bool:
    return t.sort.is_bool and t.head.owner == LRA_T


def _is_lra_var(t: Term) -> bool:
    return t.sort.is_rat and t.head.owner != LRA_T


@dataclass
class _Bound:
    """Directional numeric bound on one variable, with its symbolic origin."""

    num: Fraction
    strict: bool
    item: TrailItem
    constraint: Constraint  # directional: coeff on the variable per side
    fo_premises: tuple[Assignment, ...]


@dataclass
class _Exclusion:
    num: Fraction
    item: TrailItem
    fo_premises: tuple[Assignment, ...]


class LraModule(TheoryModule):
    name = LRA_T

    def __init__(self, store: TermStore) -> None:
        self.store = store
        self._constraints: dict[tuple[int, bool], Optional[Constraint]] = {}

    def understands(self, a: Assignment) -> bool:
        if a.is_boolean:
            return _is_lra_atom(a.term)
        return isinstance(a.value, RatVal)

    def _constraint(self, atom: Term, positive: bool) -> Optional[Constraint]:
        key = (atom.id, positive)
        hit = self._constraints.get(key, False)
        if hit is not False:
            return hit  # type: ignore[return-value]
        try:
            c: Optional[Constraint] = atom_constraint(atom, positive)
        except NonLinear:
            c = None
        self._constraints[key] = c
        return c

    # -- bound scanning ------------------------------------------------------

    def _bounds_on(
        self, view: View, x: Term
    ) -> tuple[list[_Bound], list[_Bound], list[_Exclusion]]:
        """Unit bounds on x: atoms whose other leaves all carry Q values."""
        lowers: list[_Bound] = []
        uppers: list[_Bound] = []
        exclusions: list[_Exclusion] = []
        for item in view.items:
            if not item.assignment.is_boolean or not _is_lra_atom(item.term):
                continue
            assert isinstance(item.value, BoolVal)
            c = self._constraint(item.term, item.value.value)
            if c is None:
                continue
            k = c.expr.coeff_of(x)
            if k == 0:
                continue
            rest = c.expr.const
            fo: list[Assignment] = []
            unit = True
            for leaf, kl in c.expr.coeffs:
                if leaf is x:
                    continue
                lv = view.value(leaf)
                if not isinstance(lv, RatVal):
                    unit = False
                    break
                rest += kl * lv.value
                fo.append(view.item_of(leaf).assignment)
            if not unit:
                continue
            cut = -rest / k
            fo_t = tuple(fo)
            if c.rel == NE:
                exclusions.append(_Exclusion(cut, item, fo_t))
                continue
            directions = []
            if c.rel == EQ:
                directions = [
                    Constraint(c.expr, LE),
                    Constraint(c.expr.scale(Fraction(-1)), LE),
                ]
            else:
                directions = [c]
            for d in directions:
                kd = d.expr.coeff_of(x)
                b = _Bound(cut, d.rel == LT, item, d, fo_t)
                (uppers if kd > 0 else lowers).append(b)
        return lowers, uppers, exclusions

    @staticmethod
    def _strongest(bounds: list[_Bound], lower: bool) -> Optional[_Bound]:
        if not bounds:
            return None
        sign = -1 if lower else 1

        def rank(b: _Bound) -> tuple:
            return (sign * b.num, not b.strict, b.item.index)

        return min(bounds, key=rank)

    @staticmethod
    def _empty(lo: Optional[_Bound], up: Optional[_Bound]) -> bool:
        if lo is None or up is None:
            return False
        if lo.num > up.num:
            return True
        return lo.num == up.num and (lo.strict or up.strict)

    # -- inference -------------------------------------------------------------

    def infer(self, view: View) -> Optional[Inference]:
        cands: list[tuple[int, tuple, Callable[[], Optional[Inference]]]] = []

        for t in view.universe:
            if not _is_lra_atom(t):
                continue
            r = eval_support(t, view)
            if r is None:
                continue
            v, prems = r
            cur = view.value(t)
            if cur == v:
                continue
            tier = TIER_CLASH if cur is not None else TIER_EVAL
            inf = Inference(self.name, "eval", prems, Assignment(t, v))
            cands.append(
                (tier, premise_key(view, prems) + (t.id,), lambda inf=inf: inf)
            )

        self._antisym_candidates(view, cands)

        for x in view.universe:
            if not _is_lra_var(x) or view.value(x) is not None:
                continue
            lowers, uppers, exclusions = self._bounds_on(view, x)
            lo = self._strongest(lowers, lower=True)
            up = self._strongest(uppers, lower=False)
            if self._empty(lo, up):
                entry = self._fm_candidate(view, x, lo, up)
                if entry is not None:
                    cands.append(entry)
                continue
            if (
                lo is not None
                and up is not None
                and lo.num == up.num
                and not lo.strict
                and not up.strict
            ):
                for ex in exclusions:
                    if ex.num == lo.num:
                        cands.append(self._pin_candidate(view, lo, up, ex))
                        break

        if not cands:
            return None
        best = min(cands, key=lambda c: (-c[0], c[1]))
        return best[2]()

    def _antisym_candidates(self, view: View, cands: list) -> None:
        """Mutual non-strict bounds introduce equality: from s <= t and
        t <= s (as atoms of any linear shape) conclude s = t. This is what
        lets the equality module see merges that are only entailed
        arithmetically. Rows pair up by normalized shape, so the scan is
        linear in the number of asserted bounds."""
        seen: dict[tuple, list[tuple[TrailItem, LinExpr]]] = {}
        for item in view.items:
            if not item.assignment.is_boolean or not _is_lra_atom(item.term):
                continue
            assert isinstance(item.value, BoolVal)
            c = self._constraint(item.term, item.value.value)
            if c is None or c.rel != LE or not c.expr.coeffs:
                continue
            lead = c.expr.coeffs[0][1]
            norm = c.expr.scale(Fraction(1) / abs(lead))
            key = (norm.coeffs, norm.const)
            mirror = norm.scale(Fraction(-1))
            for other, other_norm in seen.get((mirror.coeffs, mirror.const), ()):
                pos = norm if norm.coeffs[0][1] > 0 else other_norm
                t = render_constraint(Constraint(pos, EQ), self.store)
                cur = view.value(t)
                if cur == BoolVal(True):
                    continue
                tier = TIER_CLASH if cur is not None else TIER_PROP
                prems = tuple(
                    sorted(
                        {item.assignment, other.assignment},
                        key=lambda a: view.index_of(a.term),
                    )
                )
                inf = Inference(
                    self.name, "antisym", prems, Assignment(t, BoolVal(True))
                )
                cands.append(
                    (tier, premise_key(view, prems) + (t.id,), lambda inf=inf: inf)
                )
            seen.setdefault(key, []).append((item, norm))

    def _fm_candidate(self, view: View, x: Term, lo: _Bound, up: _Bound):
        resolvent = combine_bounds(lo.constraint, up.constraint, x)
        if resolvent is None:
            return None  # same atom in both directions; nothing to learn
        prems = tuple(
            a
            for a in sorted(
                {lo.item.assignment, up.item.assignment},
                key=lambda a: view.index_of(a.term),
            )
        )

        def probe_term() -> Optional[Term]:
            # render without growing the store: try existing structure only
            try:
                t = render_constraint(resolvent, self.store)
            except NonLinear:
                return None
            return t

        # Probing by rendering does intern; acceptable because an empty
        # interval always yields this same resolvent until it is resolved,
        # so the term is needed on every path that reaches here.
        t = probe_term()
        if t is None:
            return None
        cur = view.value(t)
        if cur == BoolVal(True):
            return None  # evaluation clash on t fires instead
        tier = TIER_CLASH if cur is not None else TIER_PROP
        inf = Inference(
            self.name, "fourier-motzkin", prems, Assignment(t, BoolVal(True))
        )
        return (tier, premise_key(view, prems) + (t.id,), lambda: inf)

    def _pin_candidate(self, view: View, lo: _Bound, up: _Bound, ex: _Exclusion):
        """Interval pinned to a point that a disequality excludes: conclude
        the equality, clashing with the disequality on the trail."""
        prems_set: dict[int, Assignment] = {}
        for a in (lo.item.assignment, up.item.assignment):
            prems_set[a.term.id] = a
        for fo in (lo.fo_premises, up.fo_premises, ex.fo_premises):
            for a in fo:
                prems_set[a.term.id] = a
        prems = tuple(sorted(prems_set.values(), key=lambda a: view.index_of(a.term)))
        conclusion = Assignment(ex.item.term, BoolVal(True))
        inf = Inference(self.name, "pin-eq", prems, conclusion)
        return (
            TIER_CLASH,
            premise_key(view, prems) + (ex.item.term.id,),
            lambda: inf,
        )

    # -- decisions ----------------------------------------------------------------

    def decide(self, view: View) -> Optional[Assignment]:
        for x in view.decision_basis:
            if not _is_lra_var(x) or view.value(x) is not None:
                continue
            lowers, uppers, exclusions = self._bounds_on(view, x)
            lo = self._strongest(lowers, lower=True)
            up = self._strongest(uppers, lower=False)
            if self._empty(lo, up):
                return None  # infer fires first on an empty interval
            excl = {e.num for e in exclusions}
            v = self._pick_value(lo, up, excl)
            if v is None:
                return None
            return Assignment(x, RatVal(v))
        return None

    @staticmethod
    def _pick_value(
        lo: Optional[_Bound], up: Optional[_Bound], excl: set[Fraction]
    ) -> Optional[Fraction]:
        if lo is None and up is None:
            k = 0
            seq = 0
            while Fraction(k) in excl:
                seq += 1
                k = (seq + 1) // 2 * (1 if seq % 2 else -1)
            return Fraction(k)
        if up is None:
            assert lo is not None
            n = math.ceil(lo.num)
            if lo.strict and n == lo.num:
                n += 1
            while Fraction(n) in excl:
                n += 1
            return Fraction(n)
        if lo is None:
            n = math.floor(up.num)
            if up.strict and n == up.num:
                n -= 1
            while Fraction(n) in excl:
                n -= 1
            return Fraction(n)
        # bounded interval: smallest contained integer, else midpoints
        n = math.ceil(lo.num)
        if lo.strict and n == lo.num:
            n += 1

        def in_interval(q: Fraction) -> bool:
            if q < up.num or (q == up.num and not up.strict):
                return q > lo.num or (q == lo.num and not lo.strict)
            return False

        while in_interval(Fraction(n)) and Fraction(n) in excl:
            n += 1
        if in_interval(Fraction(n)):
            return Fraction(n)
        mid = (lo.num + up.num) / 2
        if not in_interval(mid):
            return None  # degenerate point interval fully excluded
        while mid in excl:
            mid = (mid + up.num) / 2
            if not in_interval(mid):
                return None
        return mid

    # -- undo explanations -----------------------------------------------------------

    def explain_undo(
        self, view: View, conflict: Sequence[Assignment], decision: Assignment
    ) -> list[Inference]:
        x = decision.term
        dec_item = view.item_of(x)
        assert dec_item is not None
        level_a = dec_item.level
        conflict_terms = {a.term.id for a in conflict}
        lowers: list[tuple[TrailItem, Constraint]] = []
        uppers: list[tuple[TrailItem, Constraint]] = []
        for item in view.items:
            if not item.assignment.is_boolean or not _is_lra_atom(item.term):
                continue
            if item.level >= level_a:
                continue  # premise must survive the undo restriction
            assert isinstance(item.value, BoolVal)
            c = self._constraint(item.term, item.value.value)
            if c is None:
                continue
            k = c.expr.coeff_of(x)
            if k == 0 or c.rel == NE:
                continue
            if c.rel == EQ:
                directional = [Constraint(c.expr, LE), Constraint(c.expr.scale(Fraction(-1)), LE)]
            else:
                directional = [c]
            for d in directional:
                kd = d.expr.coeff_of(x)
                (uppers if kd > 0 else lowers).append((item, d))
        out: list[Inference] = []
        seen: set[int] = set()
        for lo_item, lo_c in sorted(lowers, key=lambda p: p[0].index):
            for up_item, up_c in sorted(uppers, key=lambda p: p[0].index):
                if lo_c.expr.coeff_of(x) >= 0 or up_c.expr.coeff_of(x) <= 0:
                    continue
                # only explain around the conflict: at least one side of the
                # pair must be an atom of the conflict set
                if (
                    lo_item.term.id not in conflict_terms
                    and up_item.term.id not in conflict_terms
                ):
                    continue
                r = combine_bounds(lo_c, up_c, x)
                if r is None:
                    continue
                t = render_constraint(r, self.store)
                if t.id in seen:
                    continue
                seen.add(t.id)
                prems_map = {lo_item.term.id: lo_item.assignment}
                prems_map[up_item.term.id] = up_item.assignment
                prems = tuple(
                    sorted(prems_map.values(), key=lambda a: view.index_of(a.term))
                )
                out.append(
                    Inference(
                        self.name, "fourier-motzkin", prems, Assignment(t, BoolVal(True))
                    )
                )
        exclusion = self._point_exclusion(view, conflict, decision, level_a)
        if exclusion is not None:
            out.append(exclusion)
        return out

    def _point_exclusion(
        self,
        view: View,
        conflict: Sequence[Assignment],
        decision: Assignment,
        level_a: int,
    ) -> Optional[Inference]:
        """Excluded-value lemma: when the re-decision would repeat the
        refuted value and the surviving arithmetic part of the conflict
        entails x != v by itself, conclude (x = v)<-false."""
        x = decision.term
        assert isinstance(decision.value, RatVal)
        v = decision.value.value
        survivors = View.of(
            [it for it in view.items if it.level < level_a], view.universe
        )
        lowers, uppers, exclusions = self._bounds_on(survivors, x)
        lo = self._strongest(lowers, lower=True)
        up = self._strongest(uppers, lower=False)
        if self._empty(lo, up):
            return None  # the bound clash will fire instead
        repick = self._pick_value(lo, up, {e.num for e in exclusions})
        if repick != v:
            return None  # the refuted region is already avoided
        premises = []
        constraints = []
        for a in conflict:
            if a == decision or not self.understands(a):
                continue
            item = view.item_of(a.term)
            if item is None or item.level >= level_a:
                continue
            try:
                if a.is_boolean:
                    assert isinstance(a.value, BoolVal)
                    constraints.append(atom_constraint(a.term, a.value.value))
                else:
                    assert isinstance(a.value, RatVal)
                    constraints.append(value_constraint(a.term, a.value.value))
            except NonLinear:
                return None
            premises.append(a)
        if not premises:
            return None
        if fm_satisfiable(constraints + [value_constraint(x, v)]):
            return None  # the exclusion is not entailed; nothing to learn
        e = self.store.mk_eq(x, self.store.mk_numeral(v))
        if view.value(e) is not None:
            return None
        prems = tuple(sorted(premises, key=lambda a: view.index_of(a.term)))
        return Inference(self.name, "exclude", prems, Assignment(e, BoolVal(False)))

    # -- checking ---------------------------------------------------------------------

    def check(self, premises: Sequence[Assignment], conclusion: Assignment) -> bool:
        """Validity via elimination: premises + negated conclusion must be
        unsatisfiable over Q."""
        if not conclusion.is_boolean or not _is_lra_atom(conclusion.term):
            return False
        if premises_contradictory(premises):
            return True
        constraints: list[Constraint] = []
        try:
            for p in premises:
                if p.is_boolean:
                    if _is_lra_atom(p.term):
                        assert isinstance(p.value, BoolVal)
                        constraints.append(atom_constraint(p.term, p.value.value))
                elif isinstance(p.value, RatVal):
                    constraints.append(value_constraint(p.term, p.value.value))
            assert isinstance(conclusion.value, BoolVal)
            goal = atom_constraint(conclusion.term, conclusion.value.value)
        except NonLinear:
            return False
        return not fm_satisfiable(constraints + [goal.negated()])
