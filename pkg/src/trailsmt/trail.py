"""The solver state: an ordered trail of assignments with provenance,
justifications and levels, plus the conflict-state container.

Levels follow the per-item laws: inputs sit at level 0, a deduction at the
max level of its justification (0 if empty), a decision one above the max
level of everything before it. Late propagations therefore carry low levels
and survive backjumps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .terms import Assignment, NotBoolean, Term, Value

INPUT = "input"
DECISION = "decision"
DEDUCTION = "deduction"


class TermAlreadyAssigned(Exception):
    pass


class JustificationOutOfRange(Exception):
    """A justification index does not point at an earlier trail item."""


class EmptyConflict(Exception):
    pass


@dataclass(frozen=True)
class TrailItem:
    index: int
    assignment: Assignment
    kind: str  # input | decision | deduction
    module: Optional[str]  # deciding / inferring module
    rule: Optional[str]  # inference rule tag (deductions only)
    justification: tuple[int, ...]  # indices of earlier items
    level: int
    proof: object = None  # ProofTerm node or LCF Thm, per proof mode

    @property
    def term(self) -> Term:
        return self.assignment.term

    @property
    def value(self) -> Value:
        return self.assignment.value


class Trail:
    """Single-writer: only the kernel mutates a trail; modules receive it
    through read-only views."""

    def __init__(self) -> None:
        self.items: list[TrailItem] = []
        self.by_term: dict[Term, int] = {}
        self._max_level = 0

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    # -- queries ----------------------------------------------------------

    def lookup(self, term: Term) -> Optional[TrailItem]:
        i = self.by_term.get(term)
        return None if i is None else self.items[i]

    def value(self, term: Term) -> Optional[Value]:
        item = self.lookup(term)
        return None if item is None else item.value

    def flip_present(self, a: Assignment) -> bool:
        """True iff the flipped Boolean assignment is on the trail."""
        if not a.is_boolean:
            return False
        v = self.value(a.term)
        return v is not None and v != a.value

    def max_level(self) -> int:
        return self._max_level

    @staticmethod
    def latest_in(elems: Iterable[int]) -> int:
        elems = list(elems)
        if not elems:
            raise EmptyConflict("latest_in over an empty conflict")
        return max(elems)

    # -- growth -----------------------------------------------------------

    def _check_fresh(self, a: Assignment) -> None:
        if a.term in self.by_term:
            raise TermAlreadyAssigned(f"{a.term!r} already assigned")

    def _push(self, item: TrailItem) -> TrailItem:
        self.items.append(item)
        self.by_term[item.term] = item.index
        if item.level > self._max_level:
            self._max_level = item.level
        return item

    def append_input(self, a: Assignment, proof: object = None) -> TrailItem:
        self._check_fresh(a)
        return self._push(
            TrailItem(len(self.items), a, INPUT, None, None, (), 0, proof)
        )

    def append_decision(self, a: Assignment, module: str) -> TrailItem:
        self._check_fresh(a)
        level = self._max_level + 1
        return self._push(
            TrailItem(len(self.items), a, DECISION, module, None, (), level)
        )

    def append_deduction(
        self,
        a: Assignment,
        module: str,
        rule: str,
        justification: Iterable[int],
        proof: object = None,
    ) -> TrailItem:
        self._check_fresh(a)
        if not a.is_boolean:
            raise NotBoolean("inference conclusions must be Boolean assignments")
        just = tuple(sorted(justification))
        here = len(self.items)
        for j in just:
            if not (0 <= j < here):
                raise JustificationOutOfRange(f"justification index {j} >= {here}")
        level = max((self.items[j].level for j in just), default=0)
        return self._push(
            TrailItem(here, a, DEDUCTION, module, rule, just, level, proof)
        )

    # -- trimming ---------------------------------------------------------

    def restrict_to(self, m: int) -> "Trail":
        """Keep exactly the items with level <= m, preserving order.

        Justification closure is preserved because a justification's level
        never exceeds the item's own level; indices are remapped.
        """
        out = Trail()
        remap: dict[int, int] = {}
        for item in self.items:
            if item.level > m:
                continue
            remap[item.index] = len(out.items)
            out._push(
                replace(
                    item,
                    index=len(out.items),
                    justification=tuple(remap[j] for j in item.justification),
                )
            )
        return out

    def check_wellformed(self) -> None:
        """Debug scan: single assignment, level laws, justification closure."""
        seen: set[Term] = set()
        running_max = 0
        for i, item in enumerate(self.items):
            assert item.index == i
            assert item.term not in seen, "two items share a term"
            seen.add(item.term)
            if item.kind == INPUT:
                assert item.level == 0
            elif item.kind == DECISION:
                assert item.level == running_max + 1
            else:
                want = max(
                    (self.items[j].level for j in item.justification), default=0
                )
                assert item.level == want
            for j in item.justification:
                assert j < i
                assert self.items[j].level <= item.level
            running_max = max(running_max, item.level)
        assert running_max == self._max_level


@dataclass
class ConflictState:
    """A set of trail indices jointly unsatisfiable in the union of theories."""

    elems: set[int]
    level: int
    proof: object = None

    @staticmethod
    def of(trail: Trail, elems: Iterable[int], proof: object = None) -> "ConflictState":
        es = set(elems)
        level = max((trail.items[i].level for i in es), default=0)
        return ConflictState(es, level, proof)

    def recompute_level(self, trail: Trail) -> None:
        self.level = max((trail.items[i].level for i in self.elems), default=0)

    def assignments(self, trail: Trail) -> list[Assignment]:
        return [trail.items[i].assignment for i in sorted(self.elems)]
