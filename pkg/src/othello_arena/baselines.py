"""Built-in opponents: random, greedy, corners, positional, time-managed
iterative-deepening alpha-beta, and a deliberately over-budget deep searcher
used to demonstrate time forfeits.

All strategies decide through the sealed environment API, so they respect a
stage's capture rules without ever seeing its rule flags. Tie-breaking is
row-major everywhere for reproducible logs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Board, Position, count_discs, opponent
from .env import EnvHandle, api_evaluate_board, api_get_valid_moves, api_simulate_move

BASELINE_IDS = (
    "random",
    "greedy",
    "corners",
    "positional",
    "smart-lv1",
    "smart-lv2",
    "smart-lv3-slow",
)

_DISPLAY = {
    "random": "Random",
    "greedy": "Greedy",
    "corners": "Corners",
    "positional": "Positional",
    "smart-lv1": "Smart-Lv1",
    "smart-lv2": "Smart-Lv2",
    "smart-lv3-slow": "Smart-Lv3-Slow",
    "meta-learner": "Meta-Learner",
}


def display_name(strategy_id: str) -> str:
    return _DISPLAY.get(strategy_id, strategy_id)


@dataclass
class MoveContext:
    board: Board
    player: int
    valid_moves: list[Position]
    env: EnvHandle
    rng: random.Random
    remaining_game_budget: float


STATIC_WEIGHTS_8 = (
    (120, -20, 20, 5, 5, 20, -20, 120),
    (-20, -40, -5, -5, -5, -5, -40, -20),
    (20, -5, 15, 3, 3, 15, -5, 20),
    (5, -5, 3, 3, 3, 3, -5, 5),
    (5, -5, 3, 3, 3, 3, -5, 5),
    (20, -5, 15, 3, 3, 15, -5, 20),
    (-20, -40, -5, -5, -5, -5, -40, -20),
    (120, -20, 20, 5, 5, 20, -20, 120),
)

STATIC_WEIGHTS_6 = (
    (50, -10, 10, 10, -10, 50),
    (-10, -20, -5, -5, -20, -10),
    (10, -5, 5, 5, -5, 10),
    (10, -5, 5, 5, -5, 10),
    (-10, -20, -5, -5, -20, -10),
    (50, -10, 10, 10, -10, 50),
)


def round_half_away(x: float) -> int:
    """Rounds halves away from zero (3.5 -> 4, -3.5 -> -4)."""
    if x >= 0:
        return int(x + 0.5)
    return -int(-x + 0.5)


def static_weights(size: int) -> tuple[tuple[int, ...], ...]:
    """Positional weight matrix for a board size.

    8x8 and 6x6 are fixed tables; other sizes resample the 8x8 table
    bilinearly and round.
    """
    if size == 8:
        return STATIC_WEIGHTS_8
    if size == 6:
        return STATIC_WEIGHTS_6
    return _resample(STATIC_WEIGHTS_8, size)


def _resample(source: tuple[tuple[int, ...], ...], size: int) -> tuple[tuple[int, ...], ...]:
    src_n = len(source)
    rows = []
    for r in range(size):
        row = []
        for c in range(size):
            y = (r + 0.5) * src_n / size - 0.5
            x = (c + 0.5) * src_n / size - 0.5
            y = min(max(y, 0.0), src_n - 1.0)
            x = min(max(x, 0.0), src_n - 1.0)
            y0, x0 = int(y), int(x)
            y1, x1 = min(y0 + 1, src_n - 1), min(x0 + 1, src_n - 1)
            fy, fx = y - y0, x - x0
            value = (
                source[y0][x0] * (1 - fy) * (1 - fx)
                + source[y0][x1] * (1 - fy) * fx
                + source[y1][x0] * fy * (1 - fx)
                + source[y1][x1] * fy * fx
            )
            row.append(round_half_away(value))
        rows.append(tuple(row))
    return tuple(rows)


def _require_moves(ctx: MoveContext) -> list[Position]:
    if not ctx.valid_moves:
        raise ValueError("decision requested with no valid moves")
    return ctx.valid_moves


def random_decide(ctx: MoveContext) -> Position:
    """Uniform choice driven by the context rng; deterministic given seed."""
    moves = _require_moves(ctx)
    return moves[ctx.rng.randrange(len(moves))]


def greedy_decide(ctx: MoveContext) -> Position:
    """Maximizes captured pieces; ties go to the row-major earliest move."""
    moves = _require_moves(ctx)
    best, best_captured = moves[0], -1
    for pos in moves:
        sim = api_simulate_move(ctx.env, ctx.board, ctx.player, pos.row, pos.col)
        if sim.captured_count > best_captured:
            best, best_captured = pos, sim.captured_count
    return best


def corners_decide(ctx: MoveContext) -> Position:
    """Takes any available corner (row-major), else plays positionally."""
    moves = _require_moves(ctx)
    last = ctx.board.size - 1
    corners = {Position(0, 0), Position(0, last), Position(last, 0), Position(last, last)}
    for pos in moves:
        if pos in corners:
            return pos
    return positional_decide(ctx)


def positional_decide(ctx: MoveContext) -> Position:
    """Maximizes the static positional weight of the placed cell."""
    moves = _require_moves(ctx)
    weights = static_weights(ctx.board.size)
    best, best_weight = moves[0], None
    for pos in moves:
        w = weights[pos.row][pos.col]
        if best_weight is None or w > best_weight:
            best, best_weight = pos, w
    return best


def expected_remaining_moves(board: Board) -> int:
    """Rough own-moves-left estimate: half the empty cells, at least one."""
    return max(1, count_discs(board).empty // 2)


class _SearchAbort(Exception):
    pass


_INF = float("inf")


def _search(env: EnvHandle, board: Board, to_move: int, me: int, depth: int,
            alpha: float, beta: float, deadline) -> float:
    if deadline is not None and env.elapsed() > deadline:
        raise _SearchAbort
    if depth == 0:
        return api_evaluate_board(env, board, me).total_score
    moves = api_get_valid_moves(env, board, to_move)
    if not moves:
        if not api_get_valid_moves(env, board, opponent(to_move)):
            return api_evaluate_board(env, board, me).total_score
        # Pass node: the turn flips without consuming depth.
        return _search(env, board, opponent(to_move), me, depth, alpha, beta, deadline)
    maximizing = to_move == me
    best = -_INF if maximizing else _INF
    for pos in moves:
        sim = api_simulate_move(env, board, to_move, pos.row, pos.col)
        score = _search(env, sim.resulting_board, opponent(to_move), me, depth - 1, alpha, beta, deadline)
        if maximizing:
            if score > best:
                best = score
            if best > alpha:
                alpha = best
        else:
            if score < best:
                best = score
            if best < beta:
                beta = best
        if beta <= alpha:
            break
    return best


def _root_search(ctx: MoveContext, ordered: list[Position], depth: int, deadline) -> Position:
    best, best_score = None, -_INF
    alpha = -_INF
    for pos in ordered:
        sim = api_simulate_move(ctx.env, ctx.board, ctx.player, pos.row, pos.col)
        score = _search(ctx.env, sim.resulting_board, opponent(ctx.player), ctx.player,
                        depth - 1, alpha, _INF, deadline)
        if best is None or score > best_score:
            best, best_score = pos, score
        if score > alpha:
            alpha = score
    return best


def alphabeta_decide(ctx: MoveContext, depth: int, per_move_slice: float) -> Position:
    """Iterative-deepening alpha-beta through the environment API.

    Leaves are scored by the evaluation totalScore. Deepening aborts when
    the slice or most of the remaining game budget would be exceeded; the
    best move of the deepest completed iteration is returned, so a move is
    always produced.
    """
    moves = _require_moves(ctx)
    start = ctx.env.elapsed()
    limit = min(per_move_slice, max(0.0, ctx.remaining_game_budget) * 0.8)
    deadline = start + limit
    best = moves[0]
    for d in range(1, depth + 1):
        ordered = [best] + [m for m in moves if m != best]
        try:
            best = _root_search(ctx, ordered, d, deadline)
        except _SearchAbort:
            break
    return best


def game_budget_slice(ctx: MoveContext) -> float:
    return ctx.remaining_game_budget / max(8, expected_remaining_moves(ctx.board))


def smart_slow_decide(ctx: MoveContext) -> Position:
    """Fixed depth-7 alpha-beta with no budget checks.

    Intentionally liable to exceed the cumulative game budget; used to
    demonstrate time forfeits.
    """
    moves = _require_moves(ctx)
    return _root_search(ctx, moves, 7, None)


def make_baseline(strategy_id: str):
    """Decision procedure for a baseline id; ValueError on unknown ids."""
    if strategy_id == "random":
        return random_decide
    if strategy_id == "greedy":
        return greedy_decide
    if strategy_id == "corners":
        return corners_decide
    if strategy_id == "positional":
        return positional_decide
    if strategy_id == "smart-lv1":
        return lambda ctx: alphabeta_decide(ctx, 3, game_budget_slice(ctx))
    if strategy_id == "smart-lv2":
        return lambda ctx: alphabeta_decide(ctx, 5, game_budget_slice(ctx))
    if strategy_id == "smart-lv3-slow":
        return smart_slow_decide
    raise ValueError(f"unknown baseline strategy {strategy_id!r}")
