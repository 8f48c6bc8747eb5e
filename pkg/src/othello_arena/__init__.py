"""Benchmark platform for hidden-rule Othello variants.

Intelligent systems analyze a sealed stage through a probe API under an
analysis budget, emit a strategy, and compete in time-budgeted round-robin
tournaments scored on performance, adaptation speed, efficiency,
generalization, and robustness.
"""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    BLACK,
    BLOCKED,
    EMPTY,
    WHITE,
    Board,
    Cell,
    DiscCount,
    GameOutcome,
    GameState,
    IllegalMoveError,
    MoveRecord,
    OutcomeReason,
    Position,
    RuleSet,
)
from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
