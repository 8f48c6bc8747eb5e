"""The sealed environment handle through which intelligent systems probe a
stage, plus usage accounting for the efficiency metric.

The handle carries the stage's true rules but never discloses them: callers
see only the behavior of the API functions. Beyond the three probe
functions, the handle declares turn succession and game outcomes for boards
presented to it, mirroring what watching a live game on the stage would
reveal; both are metered like every other call.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from . import kernels, timectl
from .core import (
    BLACK,
    WHITE,
    Board,
    Position,
    count_discs,
    determine_next_player,
    get_valid_moves,
)
from .stages import StageConfig


@dataclass
class ApiUsage:
    valid_moves_calls: int = 0
    simulate_calls: int = 0
    evaluate_calls: int = 0
    next_player_calls: int = 0
    outcome_calls: int = 0
    elapsed: float = 0.0

    @property
    def total_calls(self) -> int:
        return (
            self.valid_moves_calls
            + self.simulate_calls
            + self.evaluate_calls
            + self.next_player_calls
            + self.outcome_calls
        )

    def as_dict(self) -> dict:
        return {
            "validMovesCalls": self.valid_moves_calls,
            "simulateCalls": self.simulate_calls,
            "evaluateCalls": self.evaluate_calls,
            "nextPlayerCalls": self.next_player_calls,
            "outcomeCalls": self.outcome_calls,
            "elapsedMs": round(self.elapsed * 1000),
        }


@dataclass(frozen=True)
class SimulationResult:
    valid: bool
    resulting_board: Board
    captured_count: int


@dataclass(frozen=True)
class BoardEvaluation:
    piece_score: int
    mobility_score: int
    corner_score: int
    total_score: int


class EnvHandle:
    """One analysis or game session's view of a stage.

    The stage config is name-mangled away and every rule consultation
    happens inside this class; the public surface is the api_* functions,
    the usage counters, and the session clock. In deterministic timing mode
    the clock is derived from the call counters.
    """

    def __init__(self, stage: StageConfig, timing_mode: str = timectl.WALL):
        self.__stage = stage
        self.usage = ApiUsage()
        self.timing_mode = timectl.validate_mode(timing_mode)
        self.__start = time.perf_counter()
        self.board_size = stage.board_size

    def elapsed(self) -> float:
        """Seconds of session time: wall or call-derived, by timing mode."""
        if self.timing_mode == timectl.DETERMINISTIC:
            seconds = self.usage.total_calls / timectl.DET_CALLS_PER_SECOND
        else:
            seconds = time.perf_counter() - self.__start
        self.usage.elapsed = seconds
        return seconds

    def _check_size(self, board: Board) -> None:
        if board.size != self.board_size:
            raise ValueError(
                f"board size {board.size} does not match stage size {self.board_size}"
            )

    def _valid_moves(self, board: Board, player: int) -> list[Position]:
        self._check_size(board)
        self.usage.valid_moves_calls += 1
        return get_valid_moves(board, player, self.__stage.rules)

    def _simulate(self, board: Board, player: int, row: int, col: int) -> SimulationResult:
        self.usage.simulate_calls += 1
        if board.size != self.board_size or not (0 <= row < board.size and 0 <= col < board.size):
            return SimulationResult(False, board, 0)
        result = kernels.apply_move_cells(
            board.cells, board.size, player, row, col, self.__stage.rules.ignore_occlusion
        )
        if result is None:
            return SimulationResult(False, board, 0)
        new_cells, captured = result
        return SimulationResult(True, Board(board.size, new_cells), captured)

    def _evaluate(self, board: Board, player: int) -> BoardEvaluation:
        self._check_size(board)
        self.usage.evaluate_calls += 1
        rules = self.__stage.rules
        opp = 3 - player
        counts = count_discs(board)
        own_discs = counts.black if player == BLACK else counts.white
        opp_discs = counts.white if player == BLACK else counts.black
        piece = own_discs - opp_discs
        mobility = kernels.mobility(
            board.cells, board.size, player, rules.ignore_occlusion
        ) - kernels.mobility(board.cells, board.size, opp, rules.ignore_occlusion)
        corner = 25 * (_corner_count(board, player) - _corner_count(board, opp))
        return BoardEvaluation(
            piece_score=piece,
            mobility_score=mobility,
            corner_score=corner,
            total_score=piece + 2 * mobility + corner,
        )

    def _next_player(self, board: Board, mover: int) -> Optional[int]:
        self._check_size(board)
        self.usage.next_player_calls += 1
        return determine_next_player(board, mover, self.__stage.rules)

    def _outcome(self, board: Board) -> int:
        self._check_size(board)
        self.usage.outcome_calls += 1
        counts = count_discs(board)
        if counts.black == counts.white:
            return 0
        if counts.black > counts.white:
            return WHITE if self.__stage.rules.reverse_win else BLACK
        return BLACK if self.__stage.rules.reverse_win else WHITE


def make_env(stage: StageConfig, timing_mode: str = timectl.WALL) -> EnvHandle:
    return EnvHandle(stage, timing_mode)


def _corner_count(board: Board, player: int) -> int:
    last = board.size - 1
    corners = (0, last, last * board.size, last * board.size + last)
    return sum(1 for i in corners if board.cells[i] == player)


def api_get_valid_moves(env: EnvHandle, board: Board, player: int) -> list[Position]:
    """Legal placements for `player` under the stage's true rules."""
    return env._valid_moves(board, player)


def api_simulate_move(env: EnvHandle, board: Board, player: int, row: int, col: int) -> SimulationResult:
    """Outcome of a hypothetical placement; never mutates a live game.

    An illegal placement (including out-of-bounds or size-mismatched input)
    yields valid=False with the input board unchanged.
    """
    return env._simulate(board, player, row, col)


def api_evaluate_board(env: EnvHandle, board: Board, player: int) -> BoardEvaluation:
    """Fixed heuristic evaluation: discs, mobility, corners.

    pieceScore = own discs - opponent discs; mobilityScore = own moves -
    opponent moves under the stage's rules; cornerScore = 25 per corner
    differential; totalScore = pieceScore + 2*mobilityScore + cornerScore.
    Antisymmetric under player swap.
    """
    return env._evaluate(board, player)


def api_next_player(env: EnvHandle, board: Board, mover: int) -> Optional[int]:
    """Side to move after `mover` acted on `board`, or None when the game is
    over. This is the environment's authoritative turn declaration; variant
    turn rules are observable only through it."""
    return env._next_player(board, mover)


def api_declare_outcome(env: EnvHandle, board: Board) -> int:
    """Winner the environment declares for `board` as a finished game:
    1 black, 2 white, 0 tie. Win-condition variants are observable only
    through declarations like this one."""
    return env._outcome(board)
