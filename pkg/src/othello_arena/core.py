"""Pure rules engine for the Othello variants.

Covers move legality, capture resolution with and without occlusion, turn
determination (standard and fewer-pieces-continue), scoring, and win
determination (normal and reverse). Every operation is pure; all state is
immutable, so values can be shared freely across threads and processes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import NamedTuple, Optional

from . import kernels

EMPTY = 0
BLACK = 1
WHITE = 2
BLOCKED = 3

TIE = 0


class Cell(IntEnum):
    Empty = 0
    Black = 1
    White = 2
    Blocked = 3


class OutcomeReason(str, Enum):
    Normal = "normal"
    TimeForfeit = "time-forfeit"
    IllegalMove = "illegal-move"


class IllegalMoveError(ValueError):
    """Raised when a move fails validation; callers decide forfeit policy."""


class Position(NamedTuple):
    row: int
    col: int


def opponent(player: int) -> int:
    return 3 - player


@dataclass(frozen=True)
class RuleSet:
    ignore_occlusion: bool = False
    fewer_pieces_continue: bool = False
    reverse_win: bool = False


STANDARD_RULES = RuleSet()


@dataclass(frozen=True)
class Board:
    """Square board stored as flat row-major bytes of cell values 0..3."""

    size: int
    cells: bytes

    def __post_init__(self):
        if not 4 <= self.size <= 16:
            raise ValueError(f"board size {self.size} outside 4..16")
        if len(self.cells) != self.size * self.size:
            raise ValueError("cell buffer does not match board size")

    @classmethod
    def empty(cls, size: int) -> "Board":
        return cls(size, bytes(size * size))

    @classmethod
    def from_grid(cls, grid) -> "Board":
        size = len(grid)
        for row in grid:
            if len(row) != size:
                raise ValueError("grid is not square")
        flat = bytearray(size * size)
        for r, row in enumerate(grid):
            for c, value in enumerate(row):
                if value not in (EMPTY, BLACK, WHITE, BLOCKED):
                    raise ValueError(f"unknown cell value {value!r} at ({r},{c})")
                flat[r * size + c] = value
        return cls(size, bytes(flat))

    def grid(self) -> list[list[int]]:
        return [
            [self.cells[r * self.size + c] for c in range(self.size)]
            for r in range(self.size)
        ]

    def get(self, row: int, col: int) -> int:
        if not (0 <= row < self.size and 0 <= col < self.size):
            raise ValueError(f"position ({row},{col}) out of bounds for size {self.size}")
        return self.cells[row * self.size + col]

    def in_bounds(self, pos: Position) -> bool:
        return 0 <= pos.row < self.size and 0 <= pos.col < self.size

    def blocked_positions(self) -> tuple[Position, ...]:
        return tuple(
            Position(i // self.size, i % self.size)
            for i, v in enumerate(self.cells)
            if v == BLOCKED
        )


class DiscCount(NamedTuple):
    black: int
    white: int
    empty: int
    blocked: int


@dataclass(frozen=True)
class MoveRecord:
    player: int
    position: Position
    captured_count: int
    board_after: Board
    time_spent_ms: int = 0


@dataclass(frozen=True)
class GameState:
    board: Board
    current_player: int
    consecutive_passes: int = 0
    history: tuple[MoveRecord, ...] = ()
    time_used: tuple[float, float] = (0.0, 0.0)  # (black seconds, white seconds)

    @property
    def terminal(self) -> bool:
        return self.consecutive_passes >= 2


@dataclass(frozen=True)
class GameOutcome:
    winner: int  # 1 black, 2 white, 0 tie
    black_score: int
    white_score: int
    reason: OutcomeReason = OutcomeReason.Normal


def capture_lines(board: Board, player: int, pos: Position, ignore_occlusion: bool) -> list[Position]:
    """Pieces flipped by placing `player` at `pos`, in row-major order.

    Scans the 8 directions; each accumulates contiguous opponent pieces,
    treats a blocked cell as line-breaking unless occlusion is ignored (then
    it is skipped while scanning continues), and flips the accumulated run
    only when terminated by an own piece. Empty result: captures nothing.
    """
    if player not in (BLACK, WHITE):
        raise ValueError(f"player must be 1 or 2, got {player}")
    if not board.in_bounds(pos):
        raise ValueError(f"position {tuple(pos)} out of bounds for size {board.size}")
    if board.get(pos.row, pos.col) != EMPTY:
        raise ValueError(f"position {tuple(pos)} is not empty")
    flat = kernels.find_flips(board.cells, board.size, player, pos.row, pos.col, ignore_occlusion)
    return [Position(i // board.size, i % board.size) for i in flat]


def is_valid_move(board: Board, player: int, pos: Position, rules: RuleSet) -> bool:
    """True iff `pos` is empty and the placement captures at least one piece."""
    if not board.in_bounds(pos):
        return False
    if board.get(pos.row, pos.col) != EMPTY:
        return False
    return bool(kernels.find_flips(board.cells, board.size, player, pos.row, pos.col, rules.ignore_occlusion))


def get_valid_moves(board: Board, player: int, rules: RuleSet) -> list[Position]:
    """All legal placements for `player`, in deterministic row-major order."""
    flat = kernels.valid_moves(board.cells, board.size, player, rules.ignore_occlusion)
    return [Position(i // board.size, i % board.size) for i in flat]


def has_valid_move(board: Board, player: int, rules: RuleSet) -> bool:
    return kernels.has_any_move(board.cells, board.size, player, rules.ignore_occlusion)


def count_discs(board: Board) -> DiscCount:
    return DiscCount(*kernels.count_cells(board.cells, board.size))


def _next_with_pass(board: Board, mover: int, rules: RuleSet) -> tuple[Optional[int], bool]:
    """(next player or None, whether the opponent passed to produce it)."""
    opp = opponent(mover)
    if rules.fewer_pieces_continue:
        counts = count_discs(board)
        mine = counts.black if mover == BLACK else counts.white
        theirs = counts.white if mover == BLACK else counts.black
        if mine < theirs and has_valid_move(board, mover, rules):
            return mover, False
    if has_valid_move(board, opp, rules):
        return opp, False
    if has_valid_move(board, mover, rules):
        return mover, True
    return None, False


def determine_next_player(board: Board, mover: int, rules: RuleSet) -> Optional[int]:
    """Side to move after `mover` acted, or None when neither side can move.

    Under fewer-pieces-continue a mover holding strictly fewer discs moves
    again, provided it has a legal move; otherwise the opponent moves if it
    can, else the mover does (the opponent passes), else the game is over.
    """
    return _next_with_pass(board, mover, rules)[0]


def apply_move(state: GameState, pos: Position, rules: RuleSet) -> GameState:
    """New state after the current player places at `pos`.

    Flips captures, appends a move record, and advances the turn; the
    returned state is terminal when neither side can move afterwards.
    """
    if state.terminal:
        raise IllegalMoveError("game is over")
    mover = state.current_player
    board = state.board
    if not board.in_bounds(pos):
        raise IllegalMoveError(f"position {tuple(pos)} out of bounds for size {board.size}")
    result = kernels.apply_move_cells(board.cells, board.size, mover, pos.row, pos.col, rules.ignore_occlusion)
    if result is None:
        raise IllegalMoveError(
            f"illegal move for player {mover} at {position_to_notation(pos, board.size)}"
        )
    new_cells, captured = result
    new_board = Board(board.size, new_cells)
    nxt, opponent_passed = _next_with_pass(new_board, mover, rules)
    if nxt is None:
        current, passes = mover, 2
    elif nxt == mover and opponent_passed:
        current, passes = mover, 1
    else:
        current, passes = nxt, 0
    record = MoveRecord(player=mover, position=pos, captured_count=captured, board_after=new_board)
    return GameState(
        board=new_board,
        current_player=current,
        consecutive_passes=passes,
        history=state.history + (record,),
        time_used=state.time_used,
    )


def game_outcome(
    state: GameState,
    rules: RuleSet,
    reason: OutcomeReason = OutcomeReason.Normal,
    offender: Optional[int] = None,
) -> GameOutcome:
    """Final outcome; forfeit reasons award the win to the non-offender.

    A normal outcome requires a terminal state and compares disc counts,
    inverted under reverse-win. Forfeits ignore the score entirely: the
    offender loses even on a reverse-win stage.
    """
    counts = count_discs(state.board)
    if reason == OutcomeReason.Normal:
        if not state.terminal:
            raise ValueError("normal outcome requested on a non-terminal state")
        if counts.black == counts.white:
            winner = TIE
        elif counts.black > counts.white:
            winner = WHITE if rules.reverse_win else BLACK
        else:
            winner = BLACK if rules.reverse_win else WHITE
    else:
        if offender not in (BLACK, WHITE):
            raise ValueError("forfeit outcome requires the offending player")
        winner = opponent(offender)
    return GameOutcome(winner=winner, black_score=counts.black, white_score=counts.white, reason=reason)


_NOTATION_RE = re.compile(r"^([a-p])([1-9][0-9]?)$")


def position_to_notation(pos: Position, size: int) -> str:
    """(row 2, col 3) -> "d3": letter is the column, digits are row + 1."""
    if not (0 <= pos.row < size and 0 <= pos.col < size):
        raise ValueError(f"position {tuple(pos)} out of bounds for size {size}")
    return chr(ord("a") + pos.col) + str(pos.row + 1)


def notation_to_position(text: str, size: int) -> Position:
    match = _NOTATION_RE.match(text)
    if not match:
        raise ValueError(f"malformed notation {text!r}")
    col = ord(match.group(1)) - ord("a")
    row = int(match.group(2)) - 1
    if not (0 <= row < size and 0 <= col < size):
        raise ValueError(f"notation {text!r} out of range for size {size}")
    return Position(row, col)
