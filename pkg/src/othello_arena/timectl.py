"""Timing modes shared by the environment, tournament, and CLI.

Wall mode measures real time. Deterministic mode prices time in environment
API calls at a fixed rate, which makes budgets, forfeits, and reports
bit-identical across machines and runs.
"""

from __future__ import annotations

import time

WALL = "wall"
DETERMINISTIC = "deterministic"
TIMING_MODES = (WALL, DETERMINISTIC)

# One deterministic "second" buys this many environment API calls. The rate
# is sized so default budgets admit the intended workloads: a few thousand
# self-play games within the analysis budget and depth-5 search within the
# game budget.
DET_CALLS_PER_SECOND = 40000.0

# Flat per-decision charge so that even a zero-call decision consumes time.
DET_DECISION_BASE_CALLS = 1.0


def validate_mode(mode: str) -> str:
    if mode not in TIMING_MODES:
        raise ValueError(f"timing mode must be one of {TIMING_MODES}, got {mode!r}")
    return mode


class DecisionTimer:
    """Prices one decision according to the timing mode."""

    def __init__(self, mode: str = WALL):
        self.mode = validate_mode(mode)

    def measure(self, env, fn):
        """Runs fn() and returns (result, seconds charged to the decision)."""
        if self.mode == WALL:
            start = time.perf_counter()
            result = fn()
            return result, time.perf_counter() - start
        before = env.usage.total_calls
        result = fn()
        delta = env.usage.total_calls - before
        return result, (delta + DET_DECISION_BASE_CALLS) / DET_CALLS_PER_SECOND
