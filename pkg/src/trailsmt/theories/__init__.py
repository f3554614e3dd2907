"""Pluggable theory inference systems: Bool, EUF, LRA, and black-box adapters."""

from .base import Inference, View, TheoryModule, build_view, TIER_EVAL, TIER_PROP, TIER_CLASH
from .boolean import BoolModule
from .equality import EufModule
from .arith import LraModule
from .blackbox import BlackboxModule, CoreAllFirstOrder

__all__ = [
    "Inference",
    "View",
    "TheoryModule",
    "build_view",
    "BoolModule",
    "EufModule",
    "LraModule",
    "BlackboxModule",
    "CoreAllFirstOrder",
    "TIER_EVAL",
    "TIER_PROP",
    "TIER_CLASH",
]


def default_modules(store):
    return [BoolModule(store), EufModule(store), LraModule(store)]
