"""Proof-carrying machinery: abstract proof-term DAG built during solving,
an independent checker, and an LCF-style kernel that keeps only conclusions.

The five node kinds and their conclusions:

  Input(i)                  {a_i} |- a_i (assumption introduction)
  ThyInfer(M, rule, J, L)   J |- L, validated by M's inference checker
  Clash(P: J |- L, flip L)  unsat(J + {flip L})
  Res(A, P1: unsat(E+{A}), P2: J |- A)   unsat(E + J)
  EntailIntro(A, P: unsat(E+{A}))        E |- flip(A)

A refutation is a node concluding unsat(E) with E a subset of the inputs.
Checking replays the DAG bottom-up with fresh conclusion computation; nothing
is shared with the solver run that produced the proof.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .terms import Assignment, NotBoolean, Problem, assignment_key, flip


class MalformedNode(Exception):
    pass


class UncheckedProof(Exception):
    pass


@dataclass(frozen=True)
class Entails:
    premises: frozenset[Assignment]
    conclusion: Assignment

    def __str__(self) -> str:
        ps = ", ".join(str(p) for p in sorted(self.premises, key=assignment_key))
        return f"{{{ps}}} |- {self.conclusion}"


@dataclass(frozen=True)
class UnsatSet:
    elems: frozenset[Assignment]

    def __str__(self) -> str:
        ps = ", ".join(str(p) for p in sorted(self.elems, key=assignment_key))
        return f"unsat{{{ps}}}"


Conclusion = Union[Entails, UnsatSet]


@dataclass(frozen=True, eq=False)
class PInput:
    index: int
    assignment: Assignment
    concl: Entails


@dataclass(frozen=True, eq=False)
class PThy:
    module: str
    rule: str
    premises: tuple[Assignment, ...]
    conclusion: Assignment
    concl: Entails


@dataclass(frozen=True, eq=False)
class PClash:
    inf: "ProofTerm"
    opp: Assignment
    concl: UnsatSet


@dataclass(frozen=True, eq=False)
class PRes:
    pivot: Assignment
    left: "ProofTerm"
    right: "ProofTerm"
    concl: UnsatSet


@dataclass(frozen=True, eq=False)
class PEntail:
    pivot: Assignment
    inner: "ProofTerm"
    concl: Entails


ProofTerm = Union[PInput, PThy, PClash, PRes, PEntail]


def children(node: ProofTerm) -> tuple[ProofTerm, ...]:
    if isinstance(node, PClash):
        return (node.inf,)
    if isinstance(node, PRes):
        return (node.left, node.right)
    if isinstance(node, PEntail):
        return (node.inner,)
    return ()


def postorder(root: ProofTerm) -> list[ProofTerm]:
    """Children-first order, each shared node once; iterative (deep chains)."""
    out: list[ProofTerm] = []
    done: set[int] = set()
    stack: list[tuple[ProofTerm, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in done:
            continue
        if expanded:
            done.add(id(node))
            out.append(node)
        else:
            stack.append((node, True))
            for c in children(node):
                if id(c) not in done:
                    stack.append((c, False))
    return out


class ProofStore:
    """Validating constructor with DAG memoization by structural identity."""

    def __init__(self, modules: dict[str, object]) -> None:
        self.modules = modules
        self._memo: dict[tuple, ProofTerm] = {}

    def _memoize(self, key: tuple, make) -> ProofTerm:
        hit = self._memo.get(key)
        if hit is None:
            hit = make()
            self._memo[key] = hit
        return hit

    def input_node(self, index: int, a: Assignment) -> PInput:
        key = ("input", index, a)
        return self._memoize(
            key, lambda: PInput(index, a, Entails(frozenset((a,)), a))
        )

    def thy_node(
        self,
        module: str,
        rule: str,
        premises: Sequence[Assignment],
        conclusion: Assignment,
    ) -> PThy:
        mod = self.modules.get(module)
        if mod is None:
            raise MalformedNode(f"unknown module {module!r}")
        if not conclusion.is_boolean:
            raise MalformedNode("theory inference conclusion must be Boolean")
        prems = tuple(sorted(premises, key=assignment_key))
        if not mod.check(prems, conclusion):  # type: ignore[attr-defined]
            raise MalformedNode(f"{module}/{rule}: inference fails re-derivation")
        key = ("thy", module, rule, prems, conclusion)
        return self._memoize(
            key,
            lambda: PThy(
                module, rule, prems, conclusion, Entails(frozenset(prems), conclusion)
            ),
        )

    def clash_node(self, inf: ProofTerm, opp: Assignment) -> PClash:
        if not isinstance(inf.concl, Entails):
            raise MalformedNode("clash needs an entailment child")
        try:
            want = flip(inf.concl.conclusion)
        except NotBoolean as e:
            raise MalformedNode(str(e))
        if opp != want:
            raise MalformedNode("clash opponent is not the flipped conclusion")
        key = ("clash", id(inf), opp)
        return self._memoize(
            key,
            lambda: PClash(inf, opp, UnsatSet(inf.concl.premises | {opp})),
        )

    def res_node(self, pivot: Assignment, left: ProofTerm, right: ProofTerm) -> PRes:
        if not isinstance(left.concl, UnsatSet):
            raise MalformedNode("resolve: left child must conclude an unsat set")
        if pivot not in left.concl.elems:
            raise MalformedNode("resolve: pivot not in the left unsat set")
        if not isinstance(right.concl, Entails) or right.concl.conclusion != pivot:
            raise MalformedNode("resolve: right child must entail the pivot")
        key = ("res", pivot, id(left), id(right))
        return self._memoize(
            key,
            lambda: PRes(
                pivot,
                left,
                right,
                UnsatSet((left.concl.elems - {pivot}) | right.concl.premises),
            ),
        )

    def entail_node(self, pivot: Assignment, inner: ProofTerm) -> PEntail:
        if not isinstance(inner.concl, UnsatSet):
            raise MalformedNode("entail-intro: child must conclude an unsat set")
        if pivot not in inner.concl.elems:
            raise MalformedNode("entail-intro: pivot not in the unsat set")
        try:
            learned = flip(pivot)
        except NotBoolean as e:
            raise MalformedNode(str(e))
        key = ("entail", pivot, id(inner))
        return self._memoize(
            key,
            lambda: PEntail(
                pivot, inner, Entails(inner.concl.elems - {pivot}, learned)
            ),
        )


@dataclass
class CheckReport:
    ok: bool
    reason: str = ""
    node: Optional[ProofTerm] = None
    nodes_checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


def _recompute(node: ProofTerm, modules: dict[str, object]) -> Union[Conclusion, str]:
    """Fresh conclusion for a node whose children already checked, or an
    error string."""
    if isinstance(node, PInput):
        return Entails(frozenset((node.assignment,)), node.assignment)
    if isinstance(node, PThy):
        mod = modules.get(node.module)
        if mod is None:
            return f"unknown module {node.module!r}"
        if not node.conclusion.is_boolean:
            return "non-Boolean conclusion"
        if not mod.check(node.premises, node.conclusion):  # type: ignore[attr-defined]
            return f"{node.module}/{node.rule}: theory step fails re-derivation"
        return Entails(frozenset(node.premises), node.conclusion)
    if isinstance(node, PClash):
        c = node.inf.concl
        if not isinstance(c, Entails):
            return "clash over a non-entailment"
        if not c.conclusion.is_boolean or node.opp != flip(c.conclusion):
            return "clash opponent is not the flipped conclusion"
        return UnsatSet(c.premises | {node.opp})
    if isinstance(node, PRes):
        lc, rc = node.left.concl, node.right.concl
        if not isinstance(lc, UnsatSet):
            return "resolve: left child is not an unsat set"
        if node.pivot not in lc.elems:
            return "resolve: pivot missing from the left unsat set"
        if not isinstance(rc, Entails) or rc.conclusion != node.pivot:
            return "resolve: right child does not entail the pivot"
        return UnsatSet((lc.elems - {node.pivot}) | rc.premises)
    if isinstance(node, PEntail):
        ic = node.inner.concl
        if not isinstance(ic, UnsatSet):
            return "entail-intro: child is not an unsat set"
        if node.pivot not in ic.elems:
            return "entail-intro: pivot missing from the unsat set"
        if not node.pivot.is_boolean:
            return "entail-intro: first-order pivot"
        return Entails(ic.elems - {node.pivot}, flip(node.pivot))
    return f"unknown node kind {type(node).__name__}"


def check(root: ProofTerm, problem: Problem, modules: Optional[dict[str, object]] = None) -> CheckReport:
    """Replay the DAG bottom-up, re-deriving every conclusion.

    Every theory step is re-validated through the module's independent
    checker; stored conclusions must equal recomputed ones; the root must
    conclude unsat(E) with E drawn from the problem inputs.
    """
    if modules is None:
        from .theories import default_modules

        modules = {m.name: m for m in default_modules(problem.store)}
    count = 0
    for node in postorder(root):
        count += 1
        if isinstance(node, PInput):
            if not (0 <= node.index < len(problem.inputs)):
                return CheckReport(False, "input index out of range", node, count)
            if problem.inputs[node.index] != node.assignment:
                return CheckReport(False, "input does not match the problem", node, count)
        got = _recompute(node, modules)
        if isinstance(got, str):
            return CheckReport(False, got, node, count)
        if got != node.concl:
            return CheckReport(False, "stored conclusion differs from recomputation", node, count)
    if not isinstance(root.concl, UnsatSet):
        return CheckReport(False, "root does not conclude an unsat set", root, count)
    inputs = set(problem.inputs)
    stray = [a for a in root.concl.elems if a not in inputs]
    if stray:
        return CheckReport(
            False,
            f"refuted set contains non-input assignment {stray[0]}",
            root,
            count,
        )
    return CheckReport(True, "", None, count)


# ---------------------------------------------------------------------------
# LCF mode: theorems without proof objects
# ---------------------------------------------------------------------------

class LcfError(Exception):
    """A primitive operation was applied outside its side conditions."""


class Thm:
    """Opaque theorem token: carries only its conclusion.

    Constructible solely through :class:`LcfKernel`; possession implies the
    conclusion was validated when the token was made.
    """

    __slots__ = ("concl", "__weakref__")

    def __init__(self, concl: Conclusion, _guard: object = None) -> None:
        if _guard is not LcfKernel._GUARD:
            raise LcfError("theorems can only be built by the kernel")
        self.concl = concl

    def __repr__(self) -> str:
        return f"Thm({self.concl})"


class LcfKernel:
    """Trusted kernel of primitive operations over :class:`Thm` tokens.

    No derivation structure is retained: memory is proportional to the live
    conclusions. ``live`` counts tokens not yet collected; the solver samples
    it against trail length + conflict size.
    """

    _GUARD = object()

    def __init__(self, problem: Problem, modules: dict[str, object]) -> None:
        self.problem = problem
        self.modules = modules
        self.live = 0
        self.peak = 0

    def _make(self, concl: Conclusion) -> Thm:
        t = Thm(concl, self._GUARD)
        self.live += 1
        self.peak = max(self.peak, self.live)
        weakref.finalize(t, self._release)
        return t

    def _release(self) -> None:
        self.live -= 1

    def axiom(self, i: int) -> Thm:
        if not (0 <= i < len(self.problem.inputs)):
            raise LcfError(f"no input {i}")
        a = self.problem.inputs[i]
        return self._make(Entails(frozenset((a,)), a))

    def thy(
        self,
        module: str,
        rule: str,
        premises: Sequence[Assignment],
        conclusion: Assignment,
    ) -> Thm:
        mod = self.modules.get(module)
        if mod is None:
            raise LcfError(f"unknown module {module!r}")
        if not conclusion.is_boolean:
            raise LcfError("theory conclusions must be Boolean")
        prems = frozenset(premises)
        if not mod.check(tuple(sorted(prems, key=assignment_key)), conclusion):  # type: ignore[attr-defined]
            raise LcfError(f"{module}/{rule}: inference rejected at the boundary")
        return self._make(Entails(prems, conclusion))

    def clash(self, thm: Thm, opp: Assignment) -> Thm:
        c = thm.concl
        if not isinstance(c, Entails):
            raise LcfError("clash needs an entailment")
        if not c.conclusion.is_boolean or opp != flip(c.conclusion):
            raise LcfError("clash opponent is not the flipped conclusion")
        return self._make(UnsatSet(c.premises | {opp}))

    def resolve(self, pivot: Assignment, left: Thm, right: Thm) -> Thm:
        lc, rc = left.concl, right.concl
        if not isinstance(lc, UnsatSet) or pivot not in lc.elems:
            raise LcfError("resolve: pivot not in the left unsat set")
        if not isinstance(rc, Entails) or rc.conclusion != pivot:
            raise LcfError("resolve: right theorem does not entail the pivot")
        return self._make(UnsatSet((lc.elems - {pivot}) | rc.premises))

    def entail(self, pivot: Assignment, thm: Thm) -> Thm:
        c = thm.concl
        if not isinstance(c, UnsatSet) or pivot not in c.elems:
            raise LcfError("entail: pivot not in the unsat set")
        if not pivot.is_boolean:
            raise LcfError("entail: first-order pivot")
        return self._make(Entails(c.elems - {pivot}, flip(pivot)))
