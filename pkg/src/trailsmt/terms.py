"""Sorted multi-theory term algebra: interned terms, values, assignments, problems.

Terms are hash-consed per :class:`TermStore`; structural equality collapses to
identity, so term comparison and set membership are O(1) everywhere else in
the solver. Formulas are just Bool-sorted terms. Values live outside the term
language: a numeral ``3`` is a nullary constant symbol, while the value ``3``
attached to an assignment is a :class:`RatVal`. The two are deliberately not
the same object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence, Union


class IllSorted(Exception):
    """Arity or sort mismatch while building a term or assignment."""


class NotBoolean(Exception):
    """A Boolean-only operation (flip) was applied to a first-order object."""


# Theory identifiers. These tag symbol ownership, module provenance on the
# trail, and rule labels in proofs.
BOOL_T = "Bool"
EUF_T = "EUF"
LRA_T = "LRA"


@dataclass(frozen=True)
class Sort:
    kind: str  # "Bool" | "Rat" | "Uninterp"
    name: str = ""

    @property
    def is_bool(self) -> bool:
        return self.kind == "Bool"

    @property
    def is_rat(self) -> bool:
        return self.kind == "Rat"

    @property
    def is_uninterp(self) -> bool:
        return self.kind == "Uninterp"

    def __str__(self) -> str:
        return self.name if self.kind == "Uninterp" else self.kind


BOOL = Sort("Bool")
RAT = Sort("Rat")


def uninterp_sort(name: str) -> Sort:
    return Sort("Uninterp", name)


@dataclass(frozen=True)
class Symbol:
    name: str
    arg_sorts: tuple[Sort, ...]
    res_sort: Sort
    owner: str
    numeral: Optional[Fraction] = None

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __str__(self) -> str:
        return self.name


# Built-in symbol constructors. Connectives belong to Bool; arithmetic and
# the order relations to LRA; uninterpreted constants/functions to EUF.
# Equality exists at every sort: LRA owns it at Rat, EUF everywhere else.

def not_sym() -> Symbol:
    return Symbol("not", (BOOL,), BOOL, BOOL_T)


def and_sym(n: int) -> Symbol:
    return Symbol("and", (BOOL,) * n, BOOL, BOOL_T)


def or_sym(n: int) -> Symbol:
    return Symbol("or", (BOOL,) * n, BOOL, BOOL_T)


def implies_sym() -> Symbol:
    return Symbol("=>", (BOOL, BOOL), BOOL, BOOL_T)


def eq_sym(sort: Sort) -> Symbol:
    owner = LRA_T if sort.is_rat else EUF_T
    return Symbol("=", (sort, sort), BOOL, owner)


def lt_sym() -> Symbol:
    return Symbol("<", (RAT, RAT), BOOL, LRA_T)


def le_sym() -> Symbol:
    return Symbol("<=", (RAT, RAT), BOOL, LRA_T)


def add_sym(n: int) -> Symbol:
    return Symbol("+", (RAT,) * n, RAT, LRA_T)


def sub_sym() -> Symbol:
    return Symbol("-", (RAT, RAT), RAT, LRA_T)


def neg_sym() -> Symbol:
    return Symbol("-", (RAT,), RAT, LRA_T)


def mul_sym() -> Symbol:
    return Symbol("*", (RAT, RAT), RAT, LRA_T)


def numeral_sym(q: Fraction) -> Symbol:
    q = Fraction(q)
    return Symbol(str(q), (), RAT, LRA_T, numeral=q)


def const_sym(name: str, sort: Sort) -> Symbol:
    return Symbol(name, (), sort, EUF_T)


def func_sym(name: str, arg_sorts: Sequence[Sort], res_sort: Sort) -> Symbol:
    return Symbol(name, tuple(arg_sorts), res_sort, EUF_T)


@dataclass(eq=False)
class Term:
    """Interned term node. Identity (and ``id``) is canonical per store."""

    id: int
    head: Symbol
    args: tuple["Term", ...]

    @property
    def sort(self) -> Sort:
        return self.head.res_sort

    def __hash__(self) -> int:
        return self.id

    def __repr__(self) -> str:
        if not self.args:
            return f"Term({self.head.name})"
        return f"Term({self.head.name}/{len(self.args)}#{self.id})"


class TermStore:
    """Append-only interning table. One per problem; ids are dense.

    Interning is serialized (single-threaded solving); once interned, terms
    are immutable and safe to read from anywhere.
    """

    def __init__(self) -> None:
        self.terms: list[Term] = []
        self._memo: dict[tuple[Symbol, tuple[int, ...]], Term] = {}

    def __len__(self) -> int:
        return len(self.terms)

    def intern(self, head: Symbol, args: Sequence[Term] = ()) -> Term:
        args = tuple(args)
        if len(args) != head.arity:
            raise IllSorted(f"{head.name} expects {head.arity} args, got {len(args)}")
        for a, want in zip(args, head.arg_sorts):
            if a.sort != want:
                raise IllSorted(
                    f"{head.name}: argument sort {a.sort} does not match {want}"
                )
        key = (head, tuple(a.id for a in args))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        term = Term(len(self.terms), head, args)
        self.terms.append(term)
        self._memo[key] = term
        return term

    def probe(self, head: Symbol, args: Sequence[Term] = ()) -> Optional[Term]:
        """Like intern, but never creates: None if the term does not exist."""
        return self._memo.get((head, tuple(a.id for a in args)))

    # Convenience builders used throughout the solver and the tests.

    def mk_not(self, t: Term) -> Term:
        return self.intern(not_sym(), (t,))

    def mk_and(self, *ts: Term) -> Term:
        return self.intern(and_sym(len(ts)), ts)

    def mk_or(self, *ts: Term) -> Term:
        return self.intern(or_sym(len(ts)), ts)

    def mk_implies(self, a: Term, b: Term) -> Term:
        return self.intern(implies_sym(), (a, b))

    def mk_eq(self, a: Term, b: Term) -> Term:
        if a.sort != b.sort:
            raise IllSorted(f"= over mixed sorts {a.sort} / {b.sort}")
        return self.intern(eq_sym(a.sort), (a, b))

    def mk_lt(self, a: Term, b: Term) -> Term:
        return self.intern(lt_sym(), (a, b))

    def mk_le(self, a: Term, b: Term) -> Term:
        return self.intern(le_sym(), (a, b))

    def mk_add(self, *ts: Term) -> Term:
        return self.intern(add_sym(len(ts)), ts)

    def mk_sub(self, a: Term, b: Term) -> Term:
        return self.intern(sub_sym(), (a, b))

    def mk_neg(self, t: Term) -> Term:
        return self.intern(neg_sym(), (t,))

    def mk_mul(self, a: Term, b: Term) -> Term:
        return self.intern(mul_sym(), (a, b))

    def mk_numeral(self, q) -> Term:
        return self.intern(numeral_sym(Fraction(q)))

    def mk_const(self, name: str, sort: Sort) -> Term:
        return self.intern(const_sym(name, sort))

    def mk_app(self, sym: Symbol, *args: Term) -> Term:
        return self.intern(sym, args)


def is_numeral(t: Term) -> bool:
    return t.head.numeral is not None


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order walk: the term itself, then each argument subtree."""
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(cur.args))


# ---------------------------------------------------------------------------
# Values and assignments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolVal:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class RatVal:
    value: Fraction

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class AbsVal:
    """Abstract first-order value: distinct per (sort, index)."""

    sort: Sort
    index: int

    def __str__(self) -> str:
        return f"(abs {self.sort} {self.index})"


Value = Union[BoolVal, RatVal, AbsVal]

TRUE = BoolVal(True)
FALSE = BoolVal(False)


def ratval(q) -> RatVal:
    return RatVal(Fraction(q))


def value_sort(v: Value) -> Sort:
    if isinstance(v, BoolVal):
        return BOOL
    if isinstance(v, RatVal):
        return RAT
    return v.sort


def value_key(v: Value) -> tuple:
    """Total, deterministic order on values (for stable sorting only)."""
    if isinstance(v, BoolVal):
        return (0, int(v.value))
    if isinstance(v, RatVal):
        return (1, v.value.numerator, v.value.denominator)
    return (2, v.sort.name, v.index)


@dataclass(frozen=True)
class Assignment:
    """A pair term <- value. Boolean assignments are flippable."""

    term: Term
    value: Value

    def __post_init__(self) -> None:
        if value_sort(self.value) != self.term.sort:
            raise IllSorted(
                f"value of sort {value_sort(self.value)} assigned to"
                f" {self.term.sort}-sorted term"
            )

    @property
    def is_boolean(self) -> bool:
        return self.term.sort.is_bool

    def __str__(self) -> str:
        from .printer import assignment_compact

        return assignment_compact(self)


def flip(a: Assignment) -> Assignment:
    if not a.is_boolean:
        raise NotBoolean(f"cannot flip first-order assignment {a}")
    assert isinstance(a.value, BoolVal)
    return Assignment(a.term, BoolVal(not a.value.value))


def assignment_key(a: Assignment) -> tuple:
    return (a.term.id, value_key(a.value))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(t: Term, nu: Mapping[Term, Value]) -> Optional[Value]:
    """Bottom-up partial evaluation under the map ``nu``.

    Returns a value when every needed leaf is available and every head is
    interpretable: connectives (with short-circuiting, so an `or` with one
    true disjunct does not need the others), exact rational arithmetic and
    comparisons, and equality over any two values of the same sort.
    Uninterpreted applications and constants evaluate only through a direct
    entry in ``nu``. Returns None otherwise.
    """
    hit = nu.get(t)
    if hit is not None:
        return hit
    return _eval_head(t, nu)


def _eval_head(t: Term, nu: Mapping[Term, Value]) -> Optional[Value]:
    head = t.head
    if head.numeral is not None:
        return RatVal(head.numeral)
    name = head.name
    if head.owner == EUF_T and name != "=":
        return None  # uninterpreted: only a direct entry can supply a value
    if name == "not":
        v = evaluate(t.args[0], nu)
        return None if v is None else BoolVal(not v.value)  # type: ignore[union-attr]
    if name == "and" or name == "or":
        want = name == "or"  # short-circuit value
        unknown = False
        for a in t.args:
            v = evaluate(a, nu)
            if v is None:
                unknown = True
            elif v.value is want:  # type: ignore[union-attr]
                return BoolVal(want)
        return None if unknown else BoolVal(not want)
    if name == "=>":
        va = evaluate(t.args[0], nu)
        vb = evaluate(t.args[1], nu)
        if va is not None and va.value is False:  # type: ignore[union-attr]
            return TRUE
        if vb is not None and vb.value is True:  # type: ignore[union-attr]
            return TRUE
        if va is None or vb is None:
            return None
        return FALSE
    if name == "=":
        va = evaluate(t.args[0], nu)
        vb = evaluate(t.args[1], nu)
        if va is None or vb is None:
            return None
        return BoolVal(va == vb)
    if name in ("<", "<="):
        va = evaluate(t.args[0], nu)
        vb = evaluate(t.args[1], nu)
        if va is None or vb is None:
            return None
        assert isinstance(va, RatVal) and isinstance(vb, RatVal)
        ok = va.value < vb.value if name == "<" else va.value <= vb.value
        return BoolVal(ok)
    if name in ("+", "-", "*"):
        vals = []
        for a in t.args:
            v = evaluate(a, nu)
            if v is None:
                return None
            assert isinstance(v, RatVal)
            vals.append(v.value)
        if name == "+":
            return RatVal(sum(vals, Fraction(0)))
        if name == "-":
            if len(vals) == 1:
                return RatVal(-vals[0])
            return RatVal(vals[0] - vals[1])
        return RatVal(vals[0] * vals[1])
    return None


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------

@dataclass
class Problem:
    """Declarations plus the ordered input assignments."""

    store: TermStore
    sorts: dict[str, Sort] = field(default_factory=dict)
    symbols: dict[str, Symbol] = field(default_factory=dict)
    inputs: list[Assignment] = field(default_factory=list)
    _basis_cache: Optional[tuple[tuple[int, int], list[Term]]] = field(
        default=None, repr=False, compare=False
    )

    def add_input(self, a: Assignment) -> None:
        self.inputs.append(a)
        self._basis_cache = None

    def basis(self) -> list[Term]:
        mark = (len(self.store.terms), len(self.inputs))
        if self._basis_cache is not None and self._basis_cache[0] == mark:
            return self._basis_cache[1]
        out = relevant_basis(self)
        self._basis_cache = (mark, out)
        return out

    def input_basis(self) -> list[Term]:
        """Subterm closure of the inputs only: the decision universe.

        Terms interned later (resolvents, explanation atoms) are propagation
        and evaluation targets but are never decided on; deciding derived
        atoms would let every learned explanation spawn fresh search
        branches.
        """
        seen: set[int] = set()
        out: list[Term] = []
        for a in self.inputs:
            for t in subterms(a.term):
                if t.id not in seen:
                    seen.add(t.id)
                    out.append(t)
        return out


def relevant_basis(p: Problem) -> list[Term]:
    """The decision/propagation universe, deterministically ordered.

    Input order first, subterm pre-order within an input, then any terms
    interned after the inputs (explanation terms) in interning order. Every
    subterm of every input appears exactly once.
    """
    seen: set[int] = set()
    out: list[Term] = []
    for a in p.inputs:
        for t in subterms(a.term):
            if t.id not in seen:
                seen.add(t.id)
                out.append(t)
    for t in p.store.terms:
        if t.id not in seen:
            seen.add(t.id)
            out.append(t)
    return out
