"""The solver kernel: search loop (deduce/decide), conflict detection, and
the conflict-solving rules (resolve, backjump, undo-clear, fail), plus model
extraction.

One transition applies per step, chosen deterministically: pending conflicts
are analyzed first; otherwise modules are polled in registration order for an
inference, then for a decision; with neither, the trail is saturated and a
model is read off. Proof construction is delegated to a per-mode builder so
the same loop runs proofless, with proof terms, or in LCF mode.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, IO, Optional

from .printer import trace_line
from .proofs import LcfKernel, ProofStore, Thm
from .terms import (
    Assignment,
    BoolVal,
    EUF_T,
    LRA_T,
    Problem,
    Term,
    Value,
    assignment_key,
    evaluate,
    flip,
    value_key,
)
from .theories import build_view, default_modules
from .theories.base import Inference, TheoryModule
from .trail import ConflictState, DECISION, DEDUCTION, Trail, TrailItem


class KernelError(Exception):
    """Internal invariant violation (no conflict rule applies, state repeat)."""


class EndorsementFailure(Exception):
    """A saturated model failed to endorse an input assignment."""


MODE_NONE = "none"
MODE_TERMS = "proof-terms"
MODE_LCF = "lcf"


@dataclass
class Config:
    max_steps: int = 100000
    proof_mode: str = MODE_TERMS
    trace: Optional[IO[str]] = None
    check_endorsement: bool = True
    debug_checks: bool = False
    module_factory: Optional[Callable[[Problem], list[TheoryModule]]] = None

    def __post_init__(self) -> None:
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.proof_mode not in (MODE_NONE, MODE_TERMS, MODE_LCF):
            raise ValueError(f"unknown proof mode {self.proof_mode!r}")


@dataclass
class Stats:
    steps: int = 0
    decisions: int = 0
    conflicts: int = 0
    restrictions: int = 0


@dataclass
class Verdict:
    status: str  # "sat" | "unsat" | "unknown"
    model: Optional[dict[Term, Value]] = None
    refutation: object = None  # ProofTerm | Thm | None per proof mode
    core: Optional[list[Assignment]] = None  # the refuted input subset
    reason: str = ""
    stats: Stats = field(default_factory=Stats)


# -- proof builders ----------------------------------------------------------

class _NoneBuilder:
    def input_node(self, i, a):
        return None

    def thy_node(self, inf):
        return None

    def clash_node(self, infproof, opp):
        return None

    def res_node(self, pivot, left, right):
        return None

    def entail_node(self, pivot, inner):
        return None

    def sample(self, trail_len, conflict_size):
        pass


class _TermBuilder(_NoneBuilder):
    def __init__(self, modules: dict[str, TheoryModule]) -> None:
        self.store = ProofStore(modules)

    def input_node(self, i, a):
        return self.store.input_node(i, a)

    def thy_node(self, inf: Inference):
        return self.store.thy_node(inf.module, inf.rule, inf.premises, inf.conclusion)

    def clash_node(self, infproof, opp):
        return self.store.clash_node(infproof, opp)

    def res_node(self, pivot, left, right):
        return self.store.res_node(pivot, left, right)

    def entail_node(self, pivot, inner):
        return self.store.entail_node(pivot, inner)


class _LcfBuilder(_NoneBuilder):
    def __init__(self, problem: Problem, modules: dict[str, TheoryModule]) -> None:
        self.kernel = LcfKernel(problem, modules)
        self.samples: list[tuple[int, int, int]] = []  # (live, trail, conflict)

    def input_node(self, i, a):
        return self.kernel.axiom(i)

    def thy_node(self, inf: Inference):
        return self.kernel.thy(inf.module, inf.rule, inf.premises, inf.conclusion)

    def clash_node(self, infproof, opp):
        return self.kernel.clash(infproof, opp)

    def res_node(self, pivot, left, right):
        return self.kernel.resolve(pivot, left, right)

    def entail_node(self, pivot, inner):
        return self.kernel.entail(pivot, inner)

    def sample(self, trail_len, conflict_size):
        self.samples.append((self.kernel.live, trail_len, conflict_size))


# -- the solver ---------------------------------------------------------------

class Solver:
    def __init__(self, problem: Problem, config: Optional[Config] = None) -> None:
        self.problem = problem
        self.config = config or Config()
        factory = self.config.module_factory
        self.modules: list[TheoryModule] = (
            factory(problem) if factory else default_modules(problem.store)
        )
        self.by_name = {m.name: m for m in self.modules}
        if self.config.proof_mode == MODE_TERMS:
            self.builder = _TermBuilder(self.by_name)
        elif self.config.proof_mode == MODE_LCF:
            self.builder = _LcfBuilder(problem, self.by_name)
        else:
            self.builder = _NoneBuilder()
        self.trail = Trail()
        self.conflict: Optional[ConflictState] = None
        self.stats = Stats()
        self._digests: set[bytes] = set()

    # -- plumbing -----------------------------------------------------------

    def _trace(self, rule, module, assignment, level, esize) -> None:
        sink = self.config.trace
        if sink is not None:
            sink.write(
                trace_line(self.stats.steps, rule, module, assignment, level, esize)
                + "\n"
            )

    def _sample(self) -> None:
        esize = len(self.conflict.elems) if self.conflict is not None else 0
        self.builder.sample(len(self.trail), esize)

    def _digest_check(self) -> None:
        if not self.config.debug_checks:
            return
        h = hashlib.sha256()
        for it in self.trail.items:
            h.update(repr((it.term.id, value_key(it.value), it.kind, it.level)).encode())
        if self.conflict is not None:
            h.update(repr(sorted(self.conflict.elems)).encode())
        d = h.digest()
        if d in self._digests:
            raise KernelError("solver state repeated; termination bug")
        self._digests.add(d)

    def _universe(self) -> list[Term]:
        return self.problem.basis()

    # -- the loop -------------------------------------------------------------

    def run(self) -> Verdict:
        verdict = self._push_inputs()
        if verdict is not None:
            return verdict
        while self.stats.steps < self.config.max_steps:
            if self.conflict is not None:
                verdict = self._analyze_conflict()
            else:
                verdict = self._search_step()
            if verdict is not None:
                return verdict
        return Verdict("unknown", reason="step-limit", stats=self.stats)

    def _push_inputs(self) -> Optional[Verdict]:
        for i, a in enumerate(self.problem.inputs):
            existing = self.trail.lookup(a.term)
            if existing is None:
                self.trail.append_input(a, self.builder.input_node(i, a))
            elif existing.value == a.value:
                continue  # duplicate, consistent: first occurrence stands
            else:
                return self._conflicting_duplicate(existing.assignment, a)
        self._sample()
        return None

    def _conflicting_duplicate(self, first: Assignment, second: Assignment) -> Verdict:
        """Two input assignments to one term with different values."""
        self.stats.conflicts += 1
        if self.config.proof_mode == MODE_NONE:
            self._trace("fail", None, None, 0, 2)
            return Verdict("unsat", core=[first, second], stats=self.stats)
        if second.is_boolean:
            idx = self.problem.inputs.index(second)
            inode = self.builder.input_node(idx, second)
            refutation = self.builder.clash_node(inode, first)
        else:
            # bridge through reflexivity: values differ, so the premises
            # {t<-v1, t<-v2} entail (t = t)<-false, clashing with t = t
            store = self.problem.store
            e = store.mk_eq(first.term, first.term)
            owner = LRA_T if first.term.sort.is_rat else EUF_T
            refl = self.builder.thy_node(
                Inference(owner, "refl", (), Assignment(e, BoolVal(True)))
            )
            contra = self.builder.thy_node(
                Inference(
                    owner,
                    "merge",
                    tuple(sorted((first, second), key=assignment_key)),
                    Assignment(e, BoolVal(False)),
                )
            )
            clash = self.builder.clash_node(contra, Assignment(e, BoolVal(True)))
            refutation = self.builder.res_node(
                Assignment(e, BoolVal(True)), clash, refl
            )
        self._trace("fail", None, None, 0, 2)
        return Verdict(
            "unsat", refutation=refutation, core=[first, second], stats=self.stats
        )

    def _search_step(self) -> Optional[Verdict]:
        universe = self._universe()
        for m in self.modules:
            view = build_view(m, self.trail, universe)
            inf = m.infer(view)
            if inf is not None:
                self._apply_inference(m, inf)
                return None
        decision_basis = self.problem.input_basis()
        for m in self.modules:
            view = build_view(m, self.trail, self._universe(), decision_basis)
            dec = m.decide(view)
            if dec is not None:
                self.stats.steps += 1
                self.stats.decisions += 1
                item = self.trail.append_decision(dec, m.name)
                self._trace("decide", m.name, dec, item.level, None)
                self._digest_check()
                self._sample()
                return None
        return self._saturated()

    def _premise_indices(self, inf: Inference) -> list[int]:
        out = []
        for p in inf.premises:
            item = self.trail.lookup(p.term)
            if item is None or item.value != p.value:
                raise KernelError(
                    f"{inf.module}/{inf.rule}: premise {p} is not on the trail"
                )
            out.append(item.index)
        return out

    def _apply_inference(self, module: TheoryModule, inf: Inference) -> None:
        self.stats.steps += 1
        if self.config.debug_checks:
            if not module.check(inf.premises, inf.conclusion):
                raise KernelError(
                    f"{inf.module}/{inf.rule} emitted an unsound inference"
                )
        just = self._premise_indices(inf)
        if self.trail.flip_present(inf.conclusion):
            flipped_item = self.trail.lookup(inf.conclusion.term)
            assert flipped_item is not None
            cproof = self.builder.clash_node(
                self.builder.thy_node(inf), flipped_item.assignment
            )
            elems = set(just) | {flipped_item.index}
            self.conflict = ConflictState.of(self.trail, elems, cproof)
            self.stats.conflicts += 1
            self._trace(
                "conflict", inf.module, inf.conclusion, self.conflict.level, len(elems)
            )
        else:
            item = self.trail.append_deduction(
                inf.conclusion, inf.module, inf.rule, just, self.builder.thy_node(inf)
            )
            self._trace("deduce", inf.module, inf.conclusion, item.level, None)
        self._digest_check()
        self._sample()

    # -- conflict solving -------------------------------------------------------

    def _analyze_conflict(self) -> Optional[Verdict]:
        E = self.conflict
        assert E is not None and E.elems
        if E.level == 0:
            return self._fail(E)
        latest = Trail.latest_in(E.elems)
        item = self.trail.items[latest]
        if item.kind == DEDUCTION:
            self.stats.steps += 1
            self._resolve(E, item)
            self._digest_check()
            self._sample()
            return None
        if item.kind == DECISION and item.assignment.is_boolean:
            self._backjump(E, item)
            return None
        if item.kind == DECISION:
            self._undo_clear(E, item)
            return None
        raise KernelError("no conflict rule applies (latest element is an input)")

    def _resolve(self, E: ConflictState, item: TrailItem) -> None:
        if self.config.debug_checks:
            before = sorted(E.elems, reverse=True)
        E.elems.discard(item.index)
        E.elems.update(item.justification)
        E.proof = self.builder.res_node(item.assignment, E.proof, item.proof)
        E.recompute_level(self.trail)
        if self.config.debug_checks:
            after = sorted(E.elems, reverse=True)
            assert after < before, "resolve did not decrease trail positions"
        self._trace("resolve", item.module, item.assignment, E.level, len(E.elems))

    def _fail(self, E: ConflictState) -> Verdict:
        while True:
            latest = Trail.latest_in(E.elems)
            item = self.trail.items[latest]
            if item.kind != DEDUCTION:
                break
            self._resolve(E, item)
        self.stats.steps += 1
        self._trace("fail", None, None, 0, len(E.elems))
        core = E.assignments(self.trail)
        if self.config.debug_checks:
            inputs = set(self.problem.inputs)
            assert all(a in inputs for a in core), "conflict at fail not within inputs"
        self._sample()
        return Verdict(
            "unsat", refutation=E.proof, core=core, stats=self.stats
        )

    def _backjump(self, E: ConflictState, item: TrailItem) -> None:
        rest = sorted(E.elems - {item.index})
        m = max((self.trail.items[j].level for j in rest), default=0)
        premises = [self.trail.items[j].assignment for j in rest]
        learned = flip(item.assignment)
        proof = self.builder.entail_node(item.assignment, E.proof)
        old_max = self.trail.max_level()
        self.trail = self.trail.restrict_to(m)
        self.stats.restrictions += 1
        if self.config.debug_checks:
            assert self.trail.max_level() < old_max
            assert self.trail.lookup(learned.term) is None
        just = []
        for p in premises:
            surv = self.trail.lookup(p.term)
            assert surv is not None and surv.value == p.value
            just.append(surv.index)
        self.trail.append_deduction(learned, item.module or "-", "backjump", just, proof)
        E.proof = None  # the entail node replaces it; free the token now
        self.conflict = None
        self.stats.steps += 1
        self._trace("backjump", item.module, learned, m, len(rest))
        self._digest_check()
        self._sample()

    def _undo_clear(self, E: ConflictState, item: TrailItem) -> None:
        module = self.by_name[item.module]
        view = build_view(module, self.trail, self._universe())
        replay = module.explain_undo(
            view, E.assignments(self.trail), item.assignment
        )
        target = item.level - 1
        self.trail = self.trail.restrict_to(target)
        self.stats.restrictions += 1
        for inf in replay:
            if self.trail.lookup(inf.conclusion.term) is not None:
                continue  # will re-fire through deduce if it still matters
            just = self._premise_indices(inf)
            self.trail.append_deduction(
                inf.conclusion, inf.module, inf.rule, just, self.builder.thy_node(inf)
            )
        E.proof = None  # discarded by design; drop the token before sampling
        self.conflict = None
        self.stats.steps += 1
        self._trace("undo", item.module, item.assignment, target, len(replay))
        self._digest_check()
        self._sample()

    # -- saturation ----------------------------------------------------------------

    def _saturated(self) -> Optional[Verdict]:
        model = extract_model(self.trail, self.problem)
        if self.config.check_endorsement:
            bad = endorsement_failure(self.problem, model)
            if bad is not None:
                raise EndorsementFailure(bad)
        return Verdict("sat", model=model, stats=self.stats)


def leaf_model(model: dict[Term, Value]) -> dict[Term, Value]:
    """Restrict a model to its uninterpreted leaves (constants, applications).

    Everything else is recomputable, which is what makes endorsement checking
    meaningful: inputs must evaluate to their asserted values bottom-up from
    the first-order skeleton alone.
    """
    return {t: v for t, v in model.items() if t.head.owner == EUF_T}


def endorsement_failure(problem: Problem, model: dict[Term, Value]) -> Optional[str]:
    """None if every input evaluates to its assigned value over the leaf
    model; otherwise a description of the first failure."""
    leaves = leaf_model(model)
    for a in problem.inputs:
        got = evaluate(a.term, leaves)
        if got != a.value:
            return f"input {a} evaluates to {got} under the extracted model"
    return None


def extract_model(trail: Trail, problem: Problem) -> dict[Term, Value]:
    """Read the model off a saturated trail, restricted to basis terms.

    Unassigned uninterpreted-sort terms fall back to their congruence-class
    representative's value when one exists (relevant only in partial module
    configurations; native saturation assigns everything decidable).
    """
    model: dict[Term, Value] = {}
    basis = problem.basis()
    for t in basis:
        item = trail.lookup(t)
        if item is not None:
            model[t] = item.value
    missing = [t for t in basis if t not in model and t.sort.is_uninterp]
    if missing:
        from .theories import EufModule

        euf = EufModule(problem.store)
        view = build_view(euf, trail, basis)
        cc, _, witness, _ = euf._closure(view)
        for t in missing:
            w = witness.get(cc.find(t))
            if w is not None:
                model[t] = w.value
    return model


def solve(problem: Problem, config: Optional[Config] = None) -> Verdict:
    return Solver(problem, config).run()
