"""Independent brute-force oracles for differential testing.

Deliberately share nothing with the solver's search: Boolean problems are
decided by truth-table enumeration, arithmetic ones by enumerating atom
polarities and checking each conjunction with exact Fourier-Motzkin
elimination, equational ones by polarity enumeration plus a plain union-find
congruence closure (no explanations, no proof forest). First-order input
assignments are substituted as constraints before enumeration.
"""

from __future__ import annotations

from itertools import product
from typing import Optional

from .linarith import Constraint, atom_constraint, fm_satisfiable, value_constraint
from .terms import (
    Assignment,
    BOOL_T,
    BoolVal,
    EUF_T,
    LRA_T,
    Problem,
    RatVal,
    Term,
    evaluate,
    subterms,
)

SAT = "sat"
UNSAT = "unsat"


class TooLarge(Exception):
    pass


def _boolean_atoms(p: Problem) -> list[Term]:
    """Non-connective Boolean subterms of the inputs, in basis order."""
    out = []
    for t in relevant_terms(p):
        if t.sort.is_bool and not (t.head.owner == BOOL_T):
            out.append(t)
    return out


def relevant_terms(p: Problem) -> list[Term]:
    seen: set[int] = set()
    out: list[Term] = []
    for a in p.inputs:
        for t in subterms(a.term):
            if t.id not in seen:
                seen.add(t.id)
                out.append(t)
    return out


def _skeleton_ok(p: Problem, nu: dict) -> bool:
    for a in p.inputs:
        if a.is_boolean and evaluate(a.term, nu) != a.value:
            return False
    return True


def oracle_bool(p: Problem, max_atoms: int = 8) -> str:
    atoms = _boolean_atoms(p)
    if len(atoms) > max_atoms:
        raise TooLarge(f"{len(atoms)} atoms exceed the Boolean oracle limit")
    for bits in product((False, True), repeat=len(atoms)):
        nu = {t: BoolVal(b) for t, b in zip(atoms, bits)}
        if _skeleton_ok(p, nu):
            return SAT
    return UNSAT


def oracle_lra(p: Problem, max_vars: int = 5, max_atoms: int = 12) -> str:
    atoms = _boolean_atoms(p)
    arith = [t for t in atoms if t.head.owner == LRA_T]
    rat_vars = {
        t for t in relevant_terms(p) if t.sort.is_rat and t.head.owner != LRA_T
    }
    if len(rat_vars) > max_vars:
        raise TooLarge(f"{len(rat_vars)} rational variables exceed the limit")
    if len(atoms) > max_atoms:
        raise TooLarge(f"{len(atoms)} atoms exceed the limit")
    fixed: list[Constraint] = []
    for a in p.inputs:
        if not a.is_boolean:
            if not isinstance(a.value, RatVal):
                raise TooLarge("non-rational first-order input in an LRA problem")
            fixed.append(value_constraint(a.term, a.value.value))
    for bits in product((False, True), repeat=len(atoms)):
        nu = {t: BoolVal(b) for t, b in zip(atoms, bits)}
        if not _skeleton_ok(p, nu):
            continue
        constraints = list(fixed)
        for t in arith:
            constraints.append(atom_constraint(t, nu[t].value))
        if fm_satisfiable(constraints):
            return SAT
    return UNSAT


class _UnionFind:
    """Plain union-find; independent of the solver's proof forest."""

    def __init__(self) -> None:
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(x, x) != x:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _cc_satisfiable(
    eqs: list[tuple[Term, Term]],
    diseqs: list[tuple[Term, Term]],
    values: dict[Term, object],
    universe: list[Term],
) -> bool:
    uf = _UnionFind()
    for s, t in eqs:
        uf.union(s.id, t.id)
    by_value: dict[object, Term] = {}
    for t, v in values.items():
        w = by_value.get(v)
        if w is None:
            by_value[v] = t
        else:
            uf.union(t.id, w.id)
    apps = [t for t in universe if t.head.owner == EUF_T and t.args]
    changed = True
    while changed:
        changed = False
        sig: dict[tuple, Term] = {}
        for t in apps:
            key = (t.head, tuple(uf.find(a.id) for a in t.args))
            other = sig.get(key)
            if other is None:
                sig[key] = t
            elif uf.find(other.id) != uf.find(t.id):
                uf.union(other.id, t.id)
                changed = True
    for s, t in diseqs:
        if uf.find(s.id) == uf.find(t.id):
            return False
    roots_value: dict[int, object] = {}
    for t, v in values.items():
        r = uf.find(t.id)
        if r in roots_value and roots_value[r] != v:
            return False
        roots_value[r] = v
    return True


def oracle_euf(p: Problem, max_terms: int = 6, max_atoms: int = 16) -> str:
    universe = relevant_terms(p)
    ground = [t for t in universe if t.sort.is_uninterp]
    if len(ground) > max_terms:
        raise TooLarge(f"{len(ground)} ground terms exceed the limit")
    atoms = _boolean_atoms(p)
    if len(atoms) > max_atoms:
        raise TooLarge(f"{len(atoms)} atoms exceed the limit")
    fixed = {a.term: a.value for a in p.inputs if not a.is_boolean}
    for bits in product((False, True), repeat=len(atoms)):
        nu = {t: BoolVal(b) for t, b in zip(atoms, bits)}
        if not _skeleton_ok(p, nu):
            continue
        eqs, diseqs = [], []
        for t in atoms:
            if t.head.name != "=":
                continue
            if nu[t].value:
                eqs.append((t.args[0], t.args[1]))
            else:
                diseqs.append((t.args[0], t.args[1]))
        # uninterpreted predicates participate through their truth values
        values = dict(fixed)
        for t in atoms:
            if t.head.name != "=" and t.head.owner == EUF_T:
                values[t] = nu[t]
        if _cc_satisfiable(eqs, diseqs, values, universe):
            return SAT
    return UNSAT


def oracle(p: Problem, family: str) -> str:
    """Brute-force verdict for a problem of the given family."""
    if family == "bool":
        return oracle_bool(p)
    if family == "lra":
        return oracle_lra(p)
    if family == "euf":
        return oracle_euf(p)
    raise ValueError(f"unknown family {family!r}")


def lra_conjunction_oracle(
    assignments: list[Assignment],
) -> tuple[str, Optional[list[int]]]:
    """FM-based decision procedure over a conjunction of assignments,
    shaped for the black-box adapter: verdict plus a deletion-minimized
    unsat core (indices into the query)."""
    constraints: list[Constraint] = []
    idx: list[int] = []
    for k, a in enumerate(assignments):
        if a.is_boolean:
            if not isinstance(a.value, BoolVal):
                continue
            try:
                c = atom_constraint(a.term, a.value.value)
            except Exception:
                continue
        elif isinstance(a.value, RatVal):
            c = value_constraint(a.term, a.value.value)
        else:
            continue
        constraints.append(c)
        idx.append(k)
    if fm_satisfiable(constraints):
        return (SAT, None)
    core = list(range(len(constraints)))
    for j in list(core):
        trial = [constraints[k] for k in core if k != j]
        if not fm_satisfiable(trial):
            core.remove(j)
    return (UNSAT, [idx[k] for k in core])
