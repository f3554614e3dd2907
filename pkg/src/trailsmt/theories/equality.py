"""Equality and uninterpreted functions: congruence closure with explanations.

EUF is the leading theory here: its view contains every first-order
assignment (of any sort) and every equality atom, so terms carrying equal
values are propagated equal and all modules agree on shared-term equalities
at saturation. The closure is rebuilt per call over a proof forest, which
keeps explanations (premise sets) exact.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..terms import (
    Assignment,
    AbsVal,
    BoolVal,
    EUF_T,
    Term,
    TermStore,
    eq_sym,
)
from .base import (
    Candidate,
    Inference,
    TIER_CLASH,
    TIER_EVAL,
    TIER_PROP,
    TheoryModule,
    View,
    pick_candidate,
    premise_key,
    premises_contradictory,
)


class Closure:
    """Union-find over a proof forest; merges carry premise assignments."""

    def __init__(self, terms: Sequence[Term]) -> None:
        seen: set[int] = set()
        self.terms: list[Term] = []
        for t in terms:
            if t.id not in seen:
                seen.add(t.id)
                self.terms.append(t)
        self.terms.sort(key=lambda t: t.id)
        self.parent: dict[Term, Term] = {}
        self.reason: dict[Term, tuple[Assignment, ...]] = {}

    def find(self, t: Term) -> Term:
        while t in self.parent:
            t = self.parent[t]
        return t

    def _reroot(self, t: Term) -> None:
        prev: Optional[Term] = None
        prev_reason: tuple[Assignment, ...] = ()
        cur: Optional[Term] = t
        while cur is not None:
            nxt = self.parent.get(cur)
            nxt_reason = self.reason.get(cur, ())
            if prev is None:
                self.parent.pop(cur, None)
                self.reason.pop(cur, None)
            else:
                self.parent[cur] = prev
                self.reason[cur] = prev_reason
            prev, prev_reason = cur, nxt_reason
            cur = nxt

    def merge(self, u: Term, v: Term, reason: tuple[Assignment, ...]) -> bool:
        if self.find(u) is self.find(v):
            return False
        self._reroot(u)
        self.parent[u] = v
        self.reason[u] = reason
        return True

    def _path(self, t: Term) -> list[Term]:
        out = [t]
        while t in self.parent:
            t = self.parent[t]
            out.append(t)
        return out

    def explain(self, u: Term, v: Term) -> tuple[Assignment, ...]:
        """Premises connecting u and v (must be in the same class)."""
        if u is v:
            return ()
        pu = self._path(u)
        pos = {t: i for i, t in enumerate(pu)}
        edges: list[Assignment] = []
        cur = v
        while cur not in pos:
            edges.extend(self.reason[cur])
            cur = self.parent[cur]
        for t in pu[: pos[cur]]:
            edges.extend(self.reason[t])
        seen: set[tuple] = set()
        out = []
        for a in edges:
            k = (a.term.id,)
            if k not in seen:
                seen.add(k)
                out.append(a)
        return tuple(out)

    def congruence_close(self) -> None:
        apps = [
            t
            for t in self.terms
            if t.head.owner == EUF_T and t.args and t.head.name != "="
        ]
        changed = True
        while changed:
            changed = False
            sig: dict[tuple, Term] = {}
            for t in apps:
                key = (t.head, tuple(self.find(a).id for a in t.args))
                other = sig.get(key)
                if other is None:
                    sig[key] = t
                elif self.find(other) is not self.find(t):
                    reason: list[Assignment] = []
                    for a, b in zip(other.args, t.args):
                        reason.extend(self.explain(a, b))
                    self.merge(t, other, tuple(reason))
                    changed = True


def _is_eq(t: Term) -> bool:
    return t.head.name == "=" and t.head.arity == 2


class EufModule(TheoryModule):
    name = EUF_T

    def __init__(self, store: TermStore) -> None:
        self.store = store

    def understands(self, a: Assignment) -> bool:
        # the leading theory: every first-order assignment of every sort,
        # equality atoms everywhere, and Boolean values (equality exists at
        # the Bool sort, so Boolean-valued terms are merge tokens too)
        return True

    # -- closure construction ----------------------------------------------

    def _closure(
        self, view: View
    ) -> tuple[Closure, list, dict[Term, Assignment], dict[Term, Assignment]]:
        """Build the closure of the view.

        Returns (closure, diseqs, first value witness per root, second
        differing-value witness per root). Diseqs are (s, t, assignment)
        triples in trail order.
        """
        nodes = list(view.universe) + [it.term for it in view.items]
        cc = Closure(nodes)
        diseqs: list[tuple[Term, Term, Assignment]] = []
        for it in view.items:
            t = it.term
            if _is_eq(t) and isinstance(it.value, BoolVal):
                if it.value.value:
                    cc.merge(t.args[0], t.args[1], (it.assignment,))
                else:
                    diseqs.append((t.args[0], t.args[1], it.assignment))
        by_value: dict[object, Assignment] = {}
        for it in view.items:
            w = by_value.get(it.value)
            if w is None:
                by_value[it.value] = it.assignment
            else:
                cc.merge(it.term, w.term, (w, it.assignment))
        cc.congruence_close()
        witness: dict[Term, Assignment] = {}
        clash_witness: dict[Term, Assignment] = {}
        for it in view.items:
            root = cc.find(it.term)
            w = witness.get(root)
            if w is None:
                witness[root] = it.assignment
            elif w.value != it.value and root not in clash_witness:
                clash_witness[root] = it.assignment
        return cc, diseqs, witness, clash_witness

    def _distinct_reason(
        self,
        cc: Closure,
        diseqs: list,
        witness: dict[Term, Assignment],
        s: Term,
        t: Term,
    ) -> Optional[tuple[Assignment, ...]]:
        """Premises forcing s and t into distinct classes, if any."""
        rs, rt = cc.find(s), cc.find(t)
        if rs is rt:
            return None
        for u, v, d in diseqs:
            ru, rv = cc.find(u), cc.find(v)
            if (ru, rv) == (rs, rt):
                return cc.explain(s, u) + cc.explain(t, v) + (d,)
            if (ru, rv) == (rt, rs):
                return cc.explain(s, v) + cc.explain(t, u) + (d,)
        ws, wt = witness.get(rs), witness.get(rt)
        if ws is not None and wt is not None and ws.value != wt.value:
            return cc.explain(s, ws.term) + cc.explain(t, wt.term) + (ws, wt)
        return None

    # -- inference -----------------------------------------------------------

    def infer(self, view: View) -> Optional[Inference]:
        cc, diseqs, witness, clash_witness = self._closure(view)
        cands: list[Candidate] = []

        for e in view.universe:
            if not _is_eq(e):
                continue
            s, t = e.args
            cur = view.value(e)
            # value-based evaluation: both sides carry trail values (EUF-owned
            # equalities only; Rat ones are evaluated by the arithmetic module)
            if e.head.owner == EUF_T:
                si, ti = view.item_of(s), view.item_of(t)
                if si is not None and ti is not None:
                    v = BoolVal(si.value == ti.value)
                    if v != cur:
                        prems = (si.assignment, ti.assignment)
                        tier = TIER_CLASH if cur is not None else TIER_EVAL
                        inf = Inference(self.name, "eval", prems, Assignment(e, v))
                        cands.append(
                            Candidate(tier, premise_key(view, prems) + (e.id,), inf)
                        )
            # closure propagation (all sorts)
            if cc.find(s) is cc.find(t):
                if cur != BoolVal(True):
                    prems = cc.explain(s, t)
                    tier = TIER_CLASH if cur is not None else TIER_PROP
                    inf = Inference(
                        self.name, "cc", prems, Assignment(e, BoolVal(True))
                    )
                    cands.append(
                        Candidate(tier, premise_key(view, prems) + (e.id,), inf)
                    )
            else:
                reason = self._distinct_reason(cc, diseqs, witness, s, t)
                if reason is not None and cur != BoolVal(False):
                    tier = TIER_CLASH if cur is not None else TIER_PROP
                    inf = Inference(
                        self.name, "cc-neq", reason, Assignment(e, BoolVal(False))
                    )
                    cands.append(
                        Candidate(tier, premise_key(view, reason) + (e.id,), inf)
                    )

        # argument disequality: g(u...) != g(v...) with all but one argument
        # pair equal forces the remaining pair apart (contrapositive of
        # congruence); this is what keeps value decisions from repeating a
        # refuted choice
        for u, v, d in diseqs:
            inf = self._anticongruence(cc, view, u, v, d)
            if inf is not None:
                prems = inf.premises
                cands.append(
                    Candidate(
                        TIER_PROP,
                        premise_key(view, prems) + (inf.conclusion.term.id,),
                        inf,
                    )
                )

        best = pick_candidate(cands)
        if best is not None:
            return best

        # surface congruence-merged application pairs as new equality atoms;
        # their justifications live at the argument equalities' levels, so
        # the lemma survives value undos that re-derive the same clash
        surfaced = self._surface_congruence(cc, view)
        if surfaced is not None:
            return surfaced

        # surface a value clash inside a merged class by interning the
        # equality of the two differing-value witnesses
        for root in sorted(clash_witness, key=lambda r: r.id):
            w1, w2 = witness[root], clash_witness[root]
            e = self.store.mk_eq(w1.term, w2.term)
            if view.value(e) is None:
                prems = cc.explain(w1.term, w2.term)
                return Inference(self.name, "cc", prems, Assignment(e, BoolVal(True)))
        return None

    def _surface_congruence(self, cc: Closure, view: View) -> Optional[Inference]:
        classes: dict[Term, list[Term]] = {}
        for t in view.universe:
            if t.head.owner == EUF_T and t.args and not _is_eq(t):
                classes.setdefault(cc.find(t), []).append(t)
        for root in sorted(classes, key=lambda r: r.id):
            members = classes[root]
            for i, u in enumerate(members):
                for v in members[i + 1 :]:
                    if u.head != v.head:
                        continue
                    sym = eq_sym(u.sort)
                    if (
                        self.store.probe(sym, (u, v)) is not None
                        or self.store.probe(sym, (v, u)) is not None
                    ):
                        continue
                    e = self.store.mk_eq(u, v)
                    prems = cc.explain(u, v)
                    return Inference(
                        self.name, "cc", prems, Assignment(e, BoolVal(True))
                    )
        return None

    def _anticongruence(
        self, cc: Closure, view: View, u: Term, v: Term, d: Assignment
    ) -> Optional[Inference]:
        if u.head != v.head or not u.args or u.head.owner != EUF_T:
            return None
        unequal = [
            i for i, (a, b) in enumerate(zip(u.args, v.args))
            if cc.find(a) is not cc.find(b)
        ]
        if len(unequal) != 1:
            return None
        k = unequal[0]
        a, b = u.args[k], v.args[k]
        prems: list[Assignment] = [d]
        for i, (x, y) in enumerate(zip(u.args, v.args)):
            if i != k:
                prems.extend(cc.explain(x, y))
        e = self.store.mk_eq(a, b)
        if view.value(e) is not None:
            return None  # already assigned (either way handled elsewhere)
        return Inference(self.name, "cc-neq", tuple(prems), Assignment(e, BoolVal(False)))

    # -- decisions ------------------------------------------------------------

    def decide(self, view: View) -> Optional[Assignment]:
        cc = diseqs = witness = None
        for t in view.decision_basis:
            if not t.sort.is_uninterp or view.value(t) is not None:
                continue
            if cc is None:
                cc, diseqs, witness, _ = self._closure(view)
            root = cc.find(t)
            w = witness.get(root)
            if w is not None:
                return Assignment(t, w.value)
            excluded: set[int] = set()
            twins: dict[int, Assignment] = {}
            for other_root, ow in witness.items():
                if not isinstance(ow.value, AbsVal) or ow.value.sort != t.sort:
                    continue
                if self._distinct_reason(cc, diseqs, witness, t, other_root) is not None:
                    excluded.add(ow.value.index)
                elif ow.value.index not in twins:
                    twins[ow.value.index] = ow
            i = 0
            while True:
                if i not in excluded:
                    tw = twins.get(i)
                    # sharing an index merges the classes; the choice is
                    # acceptable only if the merged closure stays consistent
                    if tw is None or self._merge_consistent(view, t, tw.term):
                        return Assignment(t, AbsVal(t.sort, i))
                i += 1
        return None

    def _merge_consistent(self, view: View, s: Term, t: Term) -> bool:
        cc, diseqs, _, _ = self._closure(view)
        cc.merge(s, t, ())
        cc.congruence_close()
        for u, v, _ in diseqs:
            if cc.find(u) is cc.find(v):
                return False
        val_of: dict[Term, object] = {}
        for it in view.items:
            root = cc.find(it.term)
            v0 = val_of.get(root)
            if v0 is None:
                val_of[root] = it.value
            elif v0 != it.value:
                return False
        return True

    # -- checking ---------------------------------------------------------------

    def check(self, premises: Sequence[Assignment], conclusion: Assignment) -> bool:
        """Rerun congruence closure on exactly the premises."""
        if not conclusion.is_boolean or not _is_eq(conclusion.term):
            return False
        if premises_contradictory(premises):
            return True
        from ..terms import subterms

        nodes: list[Term] = []
        for a in [*premises, conclusion]:
            nodes.extend(subterms(a.term))
        cc = Closure(nodes)
        diseqs: list[tuple[Term, Term, Assignment]] = []
        valued = list(premises)
        for p in premises:
            if p.is_boolean and _is_eq(p.term):
                assert isinstance(p.value, BoolVal)
                if p.value.value:
                    cc.merge(p.term.args[0], p.term.args[1], (p,))
                else:
                    diseqs.append((p.term.args[0], p.term.args[1], p))
        by_value: dict[object, Assignment] = {}
        for p in valued:
            w = by_value.get(p.value)
            if w is None:
                by_value[p.value] = p
            else:
                cc.merge(p.term, w.term, (w, p))
        cc.congruence_close()

        def inconsistent() -> bool:
            for u, v, _ in diseqs:
                if cc.find(u) is cc.find(v):
                    return True
            val_of: dict[Term, object] = {}
            for p in valued:
                root = cc.find(p.term)
                v0 = val_of.get(root)
                if v0 is None:
                    val_of[root] = p.value
                elif v0 != p.value:
                    return True
            return False

        if inconsistent():
            return True
        s, t = conclusion.term.args
        assert isinstance(conclusion.value, BoolVal)
        if conclusion.value.value:
            return cc.find(s) is cc.find(t)
        # negative conclusion: adding s = t must break the premises
        cc.merge(s, t, ())
        cc.congruence_close()
        return inconsistent()
