"""Black-box theory adapter: wraps a decision procedure with verdict+core
output as a module whose single inference rule reports unsatisfiable cores.

On an unsat core containing a Boolean element L, the adapter emits
core \\ {L} |- flip(L); the kernel then sees the flip on the trail and opens
a conflict over exactly the core. Cores made only of first-order assignments
are refused (nothing flippable to conclude)."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from ..terms import Assignment, flip
from .base import Inference, TheoryModule, View, premises_contradictory

# oracle: ordered assignments -> ("sat", None) | ("unsat", core index list)
Oracle = Callable[[Sequence[Assignment]], tuple[str, Optional[list[int]]]]


class CoreAllFirstOrder(Exception):
    """The oracle's unsat core has no Boolean element to conclude about."""


class BlackboxModule(TheoryModule):
    def __init__(
        self,
        name: str,
        oracle: Oracle,
        understands_fn: Callable[[Assignment], bool],
    ) -> None:
        self.name = name
        self.oracle = oracle
        self._understands = understands_fn

    def understands(self, a: Assignment) -> bool:
        return self._understands(a)

    def infer(self, view: View) -> Optional[Inference]:
        query = view.assignments()
        if not query:
            return None
        verdict, core = self.oracle(query)
        if verdict == "sat":
            return None
        assert core is not None
        picked = sorted(core)
        assignments = [query[i] for i in picked]
        booleans = [a for a in assignments if a.is_boolean]
        if not booleans:
            raise CoreAllFirstOrder(
                f"{self.name}: unsat core contains no Boolean assignment"
            )
        latest = max(booleans, key=lambda a: view.index_of(a.term))
        premises = tuple(a for a in assignments if a is not latest)
        return Inference(self.name, "oracle", premises, flip(latest))

    def decide(self, view: View) -> Optional[Assignment]:
        return None

    def check(self, premises: Sequence[Assignment], conclusion: Assignment) -> bool:
        if not conclusion.is_boolean:
            return False
        if premises_contradictory(premises):
            return True
        query = list(premises) + [flip(conclusion)]
        verdict, _ = self.oracle(query)
        return verdict == "unsat"


def lra_oracle_modules(store):
    """Module lineup with the native arithmetic module replaced by the
    FM decision procedure behind the black-box adapter."""
    from ..oracle import lra_conjunction_oracle
    from .arith import LraModule
    from .boolean import BoolModule
    from .equality import EufModule

    probe = LraModule(store)
    adapter = BlackboxModule("LRAbox", lra_conjunction_oracle, probe.understands)
    return [BoolModule(store), EufModule(store), adapter]
