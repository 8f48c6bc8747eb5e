"""The reference intelligent system.

Within a fixed analysis budget it probes the sealed environment, runs
self-play through the API, infers behavioral rule signatures, learns a
position-value matrix and opening book, tunes one scoring parameter by
candidate duels, and emits a stage-tailored strategy.

The strategy itself is rule-blind: it only ever sees a sanitized stage view
and the environment handle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import kernels, timectl
from .baselines import (
    MoveContext,
    expected_remaining_moves,
    round_half_away,
    static_weights,
)
from .core import BLACK, BLOCKED, WHITE, Board, DiscCount, Position, count_discs, opponent
from .env import (
    EnvHandle,
    api_declare_outcome,
    api_evaluate_board,
    api_get_valid_moves,
    api_next_player,
    api_simulate_move,
)
from .stages import SanitizedStageConfig

NUM_SIM_GAMES = 3000
MAX_MOVES_PER_GAME = 60

# Disc count below which the opening book is consulted.
BOOK_DISC_LIMIT = 12

# Capture-bonus parameterizations duelled in the tuning phase; the first is
# the default and wins ties.
CANDIDATE_CAPTURE_BONUSES = (5, 2, 8)

# Rough per-API-call cost estimates used to pick a decision tier under a
# wall clock; the deterministic clock derives cost from its call rate.
_WALL_CALL_COST = {"compiled": 2e-5, "pure": 1.2e-4}


class AnalysisTimeout(RuntimeError):
    """Raised when analysis cannot finish inside the total budget."""


@dataclass(frozen=True)
class AnalysisBudget:
    """Time allocation for one stage analysis.

    `total` is the hard limit; `safety_buffer` is reserved headroom (default
    one twelfth of total, the 55/60 ratio); the three fractions split the
    usable remainder into discovery, adaptation, and tuning phases.
    """

    total: float = 60.0
    safety_buffer: Optional[float] = None
    alpha: float = 0.2
    beta: float = 0.3
    gamma: float = 0.5

    def __post_init__(self):
        if self.safety_buffer is None:
            object.__setattr__(self, "safety_buffer", self.total / 12.0)
        if self.total <= 0:
            raise ValueError("budget total must be positive")
        if not 0 <= self.safety_buffer < self.total:
            raise ValueError("safetyBuffer must be nonnegative and below total")
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if abs(self.alpha + self.beta + self.gamma - 1.0) > 1e-9:
            raise ValueError("alpha + beta + gamma must sum to 1")

    @property
    def usable(self) -> float:
        return self.total - self.safety_buffer

    def scaled(self, factor: float) -> "AnalysisBudget":
        return AnalysisBudget(
            total=self.total * factor,
            safety_buffer=self.safety_buffer * factor,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
        )


class TurnTransition(NamedTuple):
    from_player: int
    to_player: int
    passed: bool


@dataclass
class SimulationGameLog:
    """One self-play game: moves, transitions, and the env-declared winner."""

    moves: list = field(default_factory=list)
    turn_transitions: list = field(default_factory=list)
    final_scores: Optional[DiscCount] = None
    winner: int = 0


class CellStats(NamedTuple):
    plays: int
    wins: int
    black_plays: int
    black_wins: int
    white_plays: int
    white_wins: int


class PositionStats:
    """Per-cell play/win tallies from self-play.

    A cell's wins credit every move the eventual winner made there, matching
    the self-play attribution of the adaptive template.
    """

    _FIELDS = ("plays", "wins", "black_plays", "black_wins", "white_plays", "white_wins")

    def __init__(self, size: int):
        self.size = size
        for name in self._FIELDS:
            setattr(self, name, [[0] * size for _ in range(size)])

    def record_play(self, player: int, pos: Position) -> None:
        self.plays[pos.row][pos.col] += 1
        grid = self.black_plays if player == BLACK else self.white_plays
        grid[pos.row][pos.col] += 1

    def credit_win(self, player: int, pos: Position) -> None:
        self.wins[pos.row][pos.col] += 1
        grid = self.black_wins if player == BLACK else self.white_wins
        grid[pos.row][pos.col] += 1

    def cell(self, row: int, col: int) -> CellStats:
        return CellStats(*(getattr(self, name)[row][col] for name in self._FIELDS))


@dataclass(frozen=True)
class ObservedBehaviors:
    consecutive_turn_observed: bool = False
    consecutive_turn_frequency: float = 0.0
    consecutive_turn_bias_black: float = 0.0
    consecutive_turn_bias_white: float = 0.0
    capture_through_blocked_observed: bool = False
    win_condition_reversed_observed: bool = False

    def as_dict(self) -> dict:
        return {
            "consecutiveTurnObserved": self.consecutive_turn_observed,
            "consecutiveTurnFrequency": self.consecutive_turn_frequency,
            "consecutiveTurnPlayerBias": {
                "black": self.consecutive_turn_bias_black,
                "white": self.consecutive_turn_bias_white,
            },
            "captureThroughBlockedCellsObserved": self.capture_through_blocked_observed,
            "winConditionReversedObserved": self.win_condition_reversed_observed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ObservedBehaviors":
        bias = doc.get("consecutiveTurnPlayerBias", {})
        return cls(
            consecutive_turn_observed=doc["consecutiveTurnObserved"],
            consecutive_turn_frequency=doc["consecutiveTurnFrequency"],
            consecutive_turn_bias_black=bias.get("black", 0.0),
            consecutive_turn_bias_white=bias.get("white", 0.0),
            capture_through_blocked_observed=doc["captureThroughBlockedCellsObserved"],
            win_condition_reversed_observed=doc["winConditionReversedObserved"],
        )


class OpeningBookEntry(NamedTuple):
    sequence: tuple  # of (player, Position)
    win_rate: float
    games: int


# ---------------------------------------------------------------------------
# Self-play


def _sub_random(env, board, player, moves, rng):
    return moves[rng.randrange(len(moves))]


def _sub_greedy(env, board, player, moves, rng):
    best, best_captured = moves[0], -1
    for pos in moves:
        sim = api_simulate_move(env, board, player, pos.row, pos.col)
        if sim.valid and sim.captured_count > best_captured:
            best, best_captured = pos, sim.captured_count
    return best


def _sub_positional(env, board, player, moves, rng):
    weights = static_weights(board.size)
    best, best_score = None, None
    for pos in moves:
        score = weights[pos.row][pos.col]
        if best_score is None or score > best_score:
            best, best_score = pos, score
    return best


_SUB_STRATEGIES = (_sub_random, _sub_greedy, _sub_positional)


def run_self_play(
    env: EnvHandle,
    sanitized: SanitizedStageConfig,
    deadline: float,
    max_games: int = NUM_SIM_GAMES,
    *,
    rng: Optional[random.Random] = None,
    stats: Optional[PositionStats] = None,
) -> tuple[list[SimulationGameLog], PositionStats]:
    """Plays up to `max_games` games through the env API before `deadline`.

    Each game pairs two randomly chosen sub-strategies (random, greedy,
    positional), caps at 60 moves, and follows the environment's turn
    declarations. Games cut short by the deadline are still recorded.
    `deadline` is on the env session clock; pass accumulated `stats` to
    extend a previous run.
    """
    rng = rng or random.Random()
    stats = stats or PositionStats(sanitized.board_size)
    logs: list[SimulationGameLog] = []
    for _ in range(max_games):
        if env.elapsed() > deadline:
            break
        log = _play_one_sim_game(env, sanitized, deadline, rng, stats)
        logs.append(log)
    return logs, stats


def _play_one_sim_game(env, sanitized, deadline, rng, stats) -> SimulationGameLog:
    log = SimulationGameLog()
    board = sanitized.initial_board
    player = sanitized.start_player
    black_strategy = _SUB_STRATEGIES[rng.randrange(len(_SUB_STRATEGIES))]
    white_strategy = _SUB_STRATEGIES[rng.randrange(len(_SUB_STRATEGIES))]
    consecutive_passes = 0
    while len(log.moves) < MAX_MOVES_PER_GAME:
        if env.elapsed() > deadline:
            break
        moves = api_get_valid_moves(env, board, player)
        if not moves:
            consecutive_passes += 1
            if consecutive_passes >= 2:
                break
            log.turn_transitions.append(TurnTransition(player, opponent(player), True))
            player = opponent(player)
            continue
        consecutive_passes = 0
        strategy = black_strategy if player == BLACK else white_strategy
        pos = strategy(env, board, player, moves, rng)
        sim = api_simulate_move(env, board, player, pos.row, pos.col)
        if not sim.valid:
            break
        board = sim.resulting_board
        log.moves.append((player, pos, sim.captured_count))
        stats.record_play(player, pos)
        nxt = api_next_player(env, board, player)
        if nxt is None:
            break
        log.turn_transitions.append(TurnTransition(player, nxt, False))
        player = nxt
    log.final_scores = count_discs(board)
    log.winner = api_declare_outcome(env, board)
    for mover, pos, _captured in log.moves:
        if log.winner == mover:
            stats.credit_win(mover, pos)
    return log


# ---------------------------------------------------------------------------
# Behavior inference


def occlusion_probe(env: EnvHandle, sanitized: SanitizedStageConfig) -> bool:
    """True iff a capture passes through a blocked cell on this stage.

    Stages whose board has no blocked cells return False without any API
    call. Otherwise a minimal crafted row [place, White, Blocked, Black] is
    simulated; the capture succeeds only when occlusion is ignored.
    """
    if not sanitized.initial_board.blocked_positions():
        return False
    size = sanitized.board_size
    start = 1 if size >= 5 else 0
    cells = bytearray(size * size)
    cells[start + 1] = WHITE
    cells[start + 2] = BLOCKED
    cells[start + 3] = BLACK
    probe = Board(size, bytes(cells))
    sim = api_simulate_move(env, probe, BLACK, 0, start)
    return sim.valid and sim.captured_count > 0


def infer_behaviors(
    logs: list[SimulationGameLog],
    env: EnvHandle,
    sanitized: SanitizedStageConfig,
    *,
    capture_probe: Optional[bool] = None,
) -> ObservedBehaviors:
    """Distills rule signatures from self-play logs.

    Consecutive-turn frequency counts same-player pairs over adjacent move
    records (games shorter than two moves are skipped); the observed flag
    trips above 0.05, with a side bias recorded at a 1.5x margin. The
    reversed-win flag trips when any env-declared winner held fewer discs.
    The capture flag comes from the occlusion probe.
    """
    total_transitions = 0
    consecutive = 0
    black_consecutive = 0
    white_consecutive = 0
    reversed_win = False
    for log in logs:
        if len(log.moves) >= 2:
            for prev, curr in zip(log.moves, log.moves[1:]):
                total_transitions += 1
                if prev[0] == curr[0]:
                    consecutive += 1
                    if prev[0] == BLACK:
                        black_consecutive += 1
                    else:
                        white_consecutive += 1
        scores = log.final_scores
        if scores is not None:
            if scores.black > scores.white and log.winner == WHITE:
                reversed_win = True
            elif scores.white > scores.black and log.winner == BLACK:
                reversed_win = True

    frequency = consecutive / total_transitions if total_transitions else 0.0
    observed = frequency > 0.05
    bias_black = bias_white = 0.0
    if observed and consecutive:
        if black_consecutive > white_consecutive * 1.5:
            bias_black = black_consecutive / consecutive
        elif white_consecutive > black_consecutive * 1.5:
            bias_white = white_consecutive / consecutive

    if capture_probe is None:
        capture_probe = occlusion_probe(env, sanitized)

    return ObservedBehaviors(
        consecutive_turn_observed=observed,
        consecutive_turn_frequency=frequency,
        consecutive_turn_bias_black=bias_black,
        consecutive_turn_bias_white=bias_white,
        capture_through_blocked_observed=capture_probe,
        win_condition_reversed_observed=reversed_win,
    )


# ---------------------------------------------------------------------------
# Strategy synthesis


def build_value_matrix(
    stats: PositionStats,
    board_size: int,
    behaviors: ObservedBehaviors,
    blocked: tuple = (),
) -> tuple:
    """Blends the static base matrix with self-play win rates.

    Cells with at least 3 plays get confidence min(1, plays/10) and a
    (winRate - 0.5) * 100 * confidence adjustment, blended 70/30 with the
    base and rounded half away from zero. A reversed win condition negates
    every entry; blocked cells are zeroed.
    """
    base = static_weights(board_size)
    blocked_set = set(blocked)
    matrix = []
    for r in range(board_size):
        row = []
        for c in range(board_size):
            value = base[r][c]
            cell = stats.cell(r, c)
            if cell.plays >= 3:
                confidence = min(1.0, cell.plays / 10.0)
                adjustment = (cell.wins / cell.plays - 0.5) * 100.0 * confidence
                value = round_half_away(value * 0.7 + adjustment * 0.3)
            if behaviors.win_condition_reversed_observed:
                value = -value
            if Position(r, c) in blocked_set:
                value = 0
            row.append(value)
        matrix.append(tuple(row))
    return tuple(matrix)


def build_opening_book(logs: list[SimulationGameLog]) -> list[OpeningBookEntry]:
    """Mines short high-win-rate openings from self-play.

    Games with fewer than 4 moves are skipped; aggregation keys on the first
    6 moves; entries need at least 2 games and a Black win rate above 0.6;
    the best 3 by rate are kept.
    """
    aggregates: dict = {}
    for log in logs:
        if len(log.moves) < 4:
            continue
        sequence = tuple((player, pos) for player, pos, _ in log.moves[: min(6, len(log.moves))])
        entry = aggregates.setdefault(sequence, {"games": 0, "wins": 0})
        entry["games"] += 1
        if log.winner == BLACK:
            entry["wins"] += 1
    qualifying = [
        (sequence, entry["wins"] / entry["games"], entry["games"])
        for sequence, entry in aggregates.items()
        if entry["games"] >= 2 and entry["wins"] / entry["games"] > 0.6
    ]
    qualifying.sort(key=lambda item: -item[1])
    return [OpeningBookEntry(sequence, rate, games) for sequence, rate, games in qualifying[:3]]


FULL_TIER = "full"
SHALLOW_TIER = "shallow"
MATRIX_TIER = "matrix"


def _call_cost(env: EnvHandle) -> float:
    if env.timing_mode == timectl.DETERMINISTIC:
        return 1.0 / timectl.DET_CALLS_PER_SECOND
    return _WALL_CALL_COST[kernels.BACKEND]


def decision_tier(ctx: MoveContext) -> str:
    """Picks how much lookahead the remaining game budget affords.

    Full scoring costs about n*(3 + 2n) API calls for n moves; the shallow
    tier about 2n; the matrix tier none. A 2x margin guards against
    estimate error, keeping total decision time inside the game budget by
    construction.
    """
    n = max(1, len(ctx.valid_moves))
    cost = _call_cost(ctx.env)
    slice_budget = max(0.0, ctx.remaining_game_budget) / max(
        8, expected_remaining_moves(ctx.board)
    )
    if slice_budget >= n * (3 + 2 * n) * cost * 2:
        return FULL_TIER
    if slice_budget >= 2 * n * cost * 2:
        return SHALLOW_TIER
    return MATRIX_TIER


@dataclass(frozen=True)
class GeneratedStrategy:
    """The analysis product: learned data plus a fast decision procedure."""

    matrix: tuple
    book: tuple
    behaviors: ObservedBehaviors
    board_size: int
    capture_bonus: int = 5

    def decide(self, ctx: MoveContext) -> Position:
        moves = ctx.valid_moves
        if not moves:
            raise ValueError("decision requested with no valid moves")
        counts = count_discs(ctx.board)
        if counts.black + counts.white < BOOK_DISC_LIMIT and self.book:
            move = self._book_move(ctx.player, moves)
            if move is not None:
                return move
        tier = decision_tier(ctx)
        if tier == MATRIX_TIER:
            # Zero API calls; row-major first on ties.
            return max(moves, key=lambda pos: self.matrix[pos.row][pos.col])
        return self._scored_move(ctx, deep=tier == FULL_TIER)

    def _book_move(self, player: int, moves: list) -> Optional[Position]:
        move_set = set(moves)
        for entry in self.book:
            for entry_player, pos in entry.sequence:
                if entry_player == player and pos in move_set:
                    return pos
        return None

    def _scored_move(self, ctx: MoveContext, deep: bool) -> Position:
        env, board, player = ctx.env, ctx.board, ctx.player
        opp = opponent(player)
        reversed_win = self.behaviors.win_condition_reversed_observed
        best, best_score = None, None
        for pos in ctx.valid_moves:
            sim = api_simulate_move(env, board, player, pos.row, pos.col)
            if not sim.valid:
                continue
            score = float(self.matrix[pos.row][pos.col])
            score += sim.captured_count * self.capture_bonus
            evaluation = api_evaluate_board(env, sim.resulting_board, player)
            if reversed_win:
                score += -evaluation.mobility_score * 5
            else:
                score += evaluation.mobility_score * 10
            if deep:
                replies = api_get_valid_moves(env, sim.resulting_board, opp)
                if replies:
                    worst = None
                    for reply in replies:
                        reply_sim = api_simulate_move(
                            env, sim.resulting_board, opp, reply.row, reply.col
                        )
                        if not reply_sim.valid:
                            continue
                        total = api_evaluate_board(
                            env, reply_sim.resulting_board, player
                        ).total_score
                        if worst is None or total < worst:
                            worst = total
                    if worst is not None:
                        score += worst * -0.5
                else:
                    score += 100
            if best_score is None or score > best_score:
                best, best_score = pos, score
        return best if best is not None else ctx.valid_moves[0]

    def to_document(self) -> dict:
        return {
            "boardSize": self.board_size,
            "captureBonus": self.capture_bonus,
            "matrix": [list(row) for row in self.matrix],
            "openingBook": [
                {
                    "sequence": [
                        {"player": player, "position": {"row": pos.row, "col": pos.col}}
                        for player, pos in entry.sequence
                    ],
                    "winRate": entry.win_rate,
                    "games": entry.games,
                }
                for entry in self.book
            ],
            "behaviors": self.behaviors.as_dict(),
        }

    @classmethod
    def from_document(cls, doc: dict) -> "GeneratedStrategy":
        book = tuple(
            OpeningBookEntry(
                tuple(
                    (move["player"], Position(move["position"]["row"], move["position"]["col"]))
                    for move in entry["sequence"]
                ),
                entry["winRate"],
                entry["games"],
            )
            for entry in doc["openingBook"]
        )
        return cls(
            matrix=tuple(tuple(row) for row in doc["matrix"]),
            book=book,
            behaviors=ObservedBehaviors.from_dict(doc["behaviors"]),
            board_size=doc["boardSize"],
            capture_bonus=doc["captureBonus"],
        )


def synthesize_strategy(
    matrix: tuple,
    book: list,
    behaviors: ObservedBehaviors,
    board_size: int,
    capture_bonus: int = 5,
) -> GeneratedStrategy:
    return GeneratedStrategy(
        matrix=tuple(tuple(row) for row in matrix),
        book=tuple(book),
        behaviors=behaviors,
        board_size=board_size,
        capture_bonus=capture_bonus,
    )


# ---------------------------------------------------------------------------
# The analysis entry point


def _duel(env, sanitized, black: GeneratedStrategy, white: GeneratedStrategy,
          deadline: float, rng: random.Random) -> int:
    """One tuning game between two candidates; returns the declared winner."""
    board = sanitized.initial_board
    player = sanitized.start_player
    consecutive_passes = 0
    moves_made = 0
    while moves_made < MAX_MOVES_PER_GAME:
        if env.elapsed() > deadline:
            break
        moves = api_get_valid_moves(env, board, player)
        if not moves:
            consecutive_passes += 1
            if consecutive_passes >= 2:
                break
            player = opponent(player)
            continue
        consecutive_passes = 0
        strategy = black if player == BLACK else white
        ctx = MoveContext(
            board=board,
            player=player,
            valid_moves=moves,
            env=env,
            rng=rng,
            remaining_game_budget=1e9,
        )
        pos = strategy.decide(ctx)
        sim = api_simulate_move(env, board, player, pos.row, pos.col)
        if not sim.valid:
            break
        board = sim.resulting_board
        moves_made += 1
        nxt = api_next_player(env, board, player)
        if nxt is None:
            break
        player = nxt
    return api_declare_outcome(env, board)


def analyze_stage(
    sanitized: SanitizedStageConfig,
    env: EnvHandle,
    budget: AnalysisBudget,
    seed: int = 0,
) -> GeneratedStrategy:
    """Full analysis pipeline: discovery, adaptation, parameter tuning.

    Phase boundaries split the usable budget (total minus safety buffer) by
    the alpha/beta/gamma fractions on the env session clock. Discovery runs
    the occlusion probe and a self-play burst; adaptation extends self-play
    and builds the matrix and opening book; tuning duels capture-bonus
    candidates and keeps the winner. Raises AnalysisTimeout if the total
    budget is ever exceeded.
    """
    rng = random.Random(seed)
    start = env.elapsed()
    usable = budget.usable
    alpha_deadline = start + budget.alpha * usable
    beta_deadline = start + (budget.alpha + budget.beta) * usable
    gamma_deadline = start + usable

    # Discovery: direct probe, then a self-play burst for behavior evidence.
    capture_probe = occlusion_probe(env, sanitized)
    logs, stats = run_self_play(env, sanitized, alpha_deadline, NUM_SIM_GAMES, rng=rng)

    # Adaptation: extend the sample, then distill matrix and book.
    more_logs, stats = run_self_play(
        env, sanitized, beta_deadline, max(0, NUM_SIM_GAMES - len(logs)), rng=rng, stats=stats
    )
    logs.extend(more_logs)
    _check_total(env, start, budget)

    behaviors = infer_behaviors(logs, env, sanitized, capture_probe=capture_probe)
    matrix = build_value_matrix(
        stats, sanitized.board_size, behaviors,
        blocked=sanitized.initial_board.blocked_positions(),
    )
    book = build_opening_book(logs)
    candidates = [
        synthesize_strategy(matrix, book, behaviors, sanitized.board_size, bonus)
        for bonus in CANDIDATE_CAPTURE_BONUSES
    ]

    # Tuning: round-robin duels among candidates until the usable budget ends.
    points = [0.0] * len(candidates)
    pairs = [
        (i, j)
        for i in range(len(candidates))
        for j in range(len(candidates))
        if i != j
    ]
    pair_index = 0
    while env.elapsed() < gamma_deadline:
        i, j = pairs[pair_index % len(pairs)]
        pair_index += 1
        winner = _duel(env, sanitized, candidates[i], candidates[j], gamma_deadline, rng)
        if winner == BLACK:
            points[i] += 1.0
        elif winner == WHITE:
            points[j] += 1.0
        else:
            points[i] += 0.5
            points[j] += 0.5
    _check_total(env, start, budget)
    best_index = max(range(len(candidates)), key=lambda k: (points[k], -k))
    return candidates[best_index]


def _check_total(env: EnvHandle, start: float, budget: AnalysisBudget) -> None:
    if env.elapsed() - start > budget.total:
        raise AnalysisTimeout(
            f"analysis exceeded its {budget.total:.3f}s budget"
        )
