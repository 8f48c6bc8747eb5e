"""Tournament orchestration: the analysis phase under a watchdog, per-stage
round robins with cumulative time forfeits, adaptation metrics (P, A, E, G,
R), weighted scoring, and reproducible report documents.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import multiprocessing
import random
import time
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

from . import core, meta, stages
from .baselines import BASELINE_IDS, MoveContext, display_name, make_baseline
from .core import BLACK, TIE, WHITE, GameOutcome, OutcomeReason, Position, opponent
from .env import make_env
from .gamelog import DETERMINISTIC_TIMESTAMP, GameRecorder
from .meta import AnalysisBudget
from .stages import StageConfig
from .timectl import DETERMINISTIC, WALL, DecisionTimer, validate_mode

DEFAULT_WEIGHTS = {"wP": 0.40, "wA": 0.15, "wE": 0.15, "wG": 0.15, "wR": 0.15}
FIRST_GAMES_WINDOW = 4

# Watchdog slack past the analysis budget before the subprocess is killed.
WATCHDOG_GRACE_SECONDS = 0.08

# Deterministic timing prices analysis in API calls, so the watchdog only
# guards against pathological systems; the wall cap is deliberately loose.
DET_WALL_CAP_FLOOR = 30.0
DET_WALL_CAP_FACTOR = 30.0


def derive_seed(*parts) -> int:
    """Stable sub-seed from arbitrary labels (sha256, platform-independent)."""
    digest = hashlib.sha256("/".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class Budgets:
    t_analysis: float = 60.0
    t_game: float = 10.0
    scale: float = 1.0

    def __post_init__(self):
        for label, value in (
            ("tAnalysis", self.t_analysis),
            ("tGame", self.t_game),
            ("scale", self.scale),
        ):
            if not value > 0:
                raise ValueError(f"{label} must be positive, got {value!r}")

    @property
    def analysis_seconds(self) -> float:
        return self.t_analysis * self.scale

    @property
    def game_seconds(self) -> float:
        return self.t_game * self.scale


@dataclass(frozen=True)
class MatchResult:
    stage_id: str
    black_id: str
    white_id: str
    outcome: GameOutcome
    game_length: int
    per_player_time: tuple  # (black seconds, white seconds) charged


class LeaderboardRow(NamedTuple):
    strategy_id: str
    win_rate: float
    wins: int
    losses: int
    draws: int
    games: int


@dataclass(frozen=True)
class MetricVector:
    P: float
    A: float
    E: float
    G: float
    R: float

    def as_dict(self) -> dict:
        return {"P": self.P, "A": self.A, "E": self.E, "G": self.G, "R": self.R}


@dataclass(frozen=True)
class AnalysisRecord:
    system_id: str
    stage_id: str
    disqualified: bool
    elapsed: float
    reason: str = ""


@dataclass(frozen=True)
class DisqualifiedForStage:
    system_id: str
    stage_id: str
    reason: str


@dataclass(frozen=True)
class AdaptiveSystem:
    """An entrant that must synthesize its strategy per stage within budget."""

    id: str
    analyze: Callable  # (sanitized, env, AnalysisBudget, seed) -> strategy


SYSTEMS = {"meta-learner": AdaptiveSystem("meta-learner", meta.analyze_stage)}


@dataclass(frozen=True)
class StageReport:
    stage_id: str
    budgets: Budgets
    entrant_ids: tuple
    results: tuple  # MatchResult, schedule order
    leaderboard: tuple  # LeaderboardRow
    logs: tuple  # GameLog, schedule order
    analysis: tuple = ()  # AnalysisRecord per adaptive system


# ---------------------------------------------------------------------------
# Single game


def _ready_state(state, rules):
    """Resolves a mover with no legal move before the first placement."""
    if core.has_valid_move(state.board, state.current_player, rules):
        return state
    opp = opponent(state.current_player)
    if core.has_valid_move(state.board, opp, rules):
        return dataclasses.replace(state, current_player=opp, consecutive_passes=1)
    return dataclasses.replace(state, consecutive_passes=2)


def run_game(
    stage: StageConfig,
    black,
    white,
    budgets: Budgets,
    seed: int,
    *,
    black_id: str = "black",
    white_id: str = "white",
    timing_mode: str = WALL,
):
    """One time-forfeiting game between two decision procedures.

    Every decision is measured (wall seconds or call-priced seconds by
    timing mode) against the mover's cumulative budget; the first overrun
    forfeits immediately and the overrunning move is not applied. An illegal
    or crashing decision forfeits the same way. Returns (MatchResult,
    GameLog).
    """
    validate_mode(timing_mode)
    rules = stage.rules
    deciders = {BLACK: black, WHITE: white}
    ids = {BLACK: black_id, WHITE: white_id}
    envs = {
        BLACK: make_env(stage, timing_mode),
        WHITE: make_env(stage, timing_mode),
    }
    rngs = {
        BLACK: random.Random(derive_seed(seed, "black")),
        WHITE: random.Random(derive_seed(seed, "white")),
    }
    remaining = {BLACK: budgets.game_seconds, WHITE: budgets.game_seconds}
    used = {BLACK: 0.0, WHITE: 0.0}
    timer = DecisionTimer(timing_mode)

    state = _ready_state(stages.initial_state(stage), rules)
    timestamp = DETERMINISTIC_TIMESTAMP if timing_mode == DETERMINISTIC else None
    recorder = GameRecorder(
        stage, display_name(black_id), display_name(white_id), state.board, timestamp
    )

    outcome = None
    while not state.terminal:
        mover = state.current_player
        ctx = MoveContext(
            board=state.board,
            player=mover,
            valid_moves=core.get_valid_moves(state.board, mover, rules),
            env=envs[mover],
            rng=rngs[mover],
            remaining_game_budget=remaining[mover],
        )
        try:
            pos, cost = timer.measure(envs[mover], lambda: deciders[mover](ctx))
        except Exception:
            outcome = core.game_outcome(
                state, rules, reason=OutcomeReason.IllegalMove, offender=mover
            )
            break
        used[mover] += cost
        remaining[mover] -= cost
        if remaining[mover] < 0:
            outcome = core.game_outcome(
                state, rules, reason=OutcomeReason.TimeForfeit, offender=mover
            )
            break
        # Re-check legality from scratch; the ctx list is strategy-writable.
        try:
            move = Position(*pos)
            legal = core.is_valid_move(state.board, mover, move, rules)
        except Exception:
            legal = False
        if not legal:
            outcome = core.game_outcome(
                state, rules, reason=OutcomeReason.IllegalMove, offender=mover
            )
            break
        state = core.apply_move(state, move, rules)
        recorder.record(
            dataclasses.replace(
                state.history[-1], time_spent_ms=int(round(cost * 1000))
            )
        )
    if outcome is None:
        outcome = core.game_outcome(state, rules)

    log = recorder.finish(outcome)
    result = MatchResult(
        stage_id=stage.id,
        black_id=black_id,
        white_id=white_id,
        outcome=outcome,
        game_length=len(log.moves),
        per_player_time=(used[BLACK], used[WHITE]),
    )
    return result, log


# ---------------------------------------------------------------------------
# Round robin


def round_robin_schedule(entrant_ids) -> list:
    """Ordered pairs (black, white): n(n-1) games, each pairing both ways."""
    return [
        (a, b) for a in entrant_ids for b in entrant_ids if a != b
    ]


def build_leaderboard(entrant_ids, results) -> tuple:
    tally = {eid: [0, 0, 0] for eid in entrant_ids}  # wins, losses, draws
    for result in results:
        winner = result.outcome.winner
        if winner == TIE:
            tally[result.black_id][2] += 1
            tally[result.white_id][2] += 1
        else:
            winner_id = result.black_id if winner == BLACK else result.white_id
            loser_id = result.white_id if winner == BLACK else result.black_id
            tally[winner_id][0] += 1
            tally[loser_id][1] += 1
    rows = []
    for eid in entrant_ids:
        wins, losses, draws = tally[eid]
        games = wins + losses + draws
        rate = (wins + 0.5 * draws) / games if games else 0.0
        rows.append(LeaderboardRow(eid, rate, wins, losses, draws, games))
    rows.sort(key=lambda row: (-row.win_rate, -row.wins, row.strategy_id))
    return tuple(rows)


def run_stage_round_robin(
    stage: StageConfig,
    entrants,
    budgets: Budgets,
    seed: int = 0,
    *,
    timing_mode: str = WALL,
) -> StageReport:
    """Every ordered pair of entrants plays once; entrants is [(id, decide)]."""
    if len(entrants) < 2:
        raise ValueError("round robin requires at least two entrants")
    by_id = dict(entrants)
    if len(by_id) != len(entrants):
        raise ValueError("entrant ids must be unique")
    entrant_ids = tuple(eid for eid, _ in entrants)
    results = []
    logs = []
    for index, (black_id, white_id) in enumerate(round_robin_schedule(entrant_ids)):
        result, log = run_game(
            stage,
            by_id[black_id],
            by_id[white_id],
            budgets,
            derive_seed(seed, stage.id, index, black_id, white_id),
            black_id=black_id,
            white_id=white_id,
            timing_mode=timing_mode,
        )
        results.append(result)
        logs.append(log)
    return StageReport(
        stage_id=stage.id,
        budgets=budgets,
        entrant_ids=entrant_ids,
        results=tuple(results),
        leaderboard=build_leaderboard(entrant_ids, results),
        logs=tuple(logs),
    )


# ---------------------------------------------------------------------------
# Analysis phase


def _analysis_child(conn, system, stage, budget, seed, timing_mode):
    start = time.perf_counter()
    try:
        env = make_env(stage, timing_mode)
        sanitized = stages.public_view(stage)
        strategy = system.analyze(sanitized, env, budget, seed)
        elapsed = env.elapsed() if timing_mode == DETERMINISTIC else time.perf_counter() - start
        conn.send(("ok", strategy, elapsed))
    except Exception as exc:
        conn.send(("error", f"{type(exc).__name__}: {exc}", time.perf_counter() - start))
    finally:
        conn.close()


def run_analysis_phase(
    system: AdaptiveSystem,
    stage: StageConfig,
    budgets: Budgets,
    *,
    timing_mode: str = WALL,
    seed: int = 0,
):
    """Runs the system's analyze entry in a forked subprocess under a watchdog.

    Returns (GeneratedStrategy | DisqualifiedForStage, AnalysisRecord). The
    wall-mode watchdog kills the child shortly past the budget; deterministic
    mode prices time in API calls, so only a loose wall cap guards against
    systems that ignore the call clock entirely.
    """
    validate_mode(timing_mode)
    budget = AnalysisBudget(total=budgets.analysis_seconds)
    if timing_mode == WALL:
        wall_limit = budgets.analysis_seconds + WATCHDOG_GRACE_SECONDS
    else:
        wall_limit = max(DET_WALL_CAP_FLOOR, DET_WALL_CAP_FACTOR * budgets.analysis_seconds)

    ctx = multiprocessing.get_context("fork")
    recv_conn, send_conn = ctx.Pipe(duplex=False)
    child = ctx.Process(
        target=_analysis_child,
        args=(send_conn, system, stage, budget, seed, timing_mode),
    )
    child.start()
    send_conn.close()
    child.join(wall_limit)
    if child.is_alive():
        child.terminate()
        child.join(1.0)
        recv_conn.close()
        record = AnalysisRecord(
            system.id, stage.id, True, budgets.analysis_seconds, "timeout"
        )
        return DisqualifiedForStage(system.id, stage.id, "timeout"), record
    try:
        message = recv_conn.recv() if recv_conn.poll(1.0) else None
    except EOFError:
        message = None
    finally:
        recv_conn.close()
    if message is None:
        record = AnalysisRecord(system.id, stage.id, True, 0.0, "crashed")
        return DisqualifiedForStage(system.id, stage.id, "crashed"), record
    status, payload, elapsed = message
    if status != "ok":
        record = AnalysisRecord(system.id, stage.id, True, elapsed, payload)
        return DisqualifiedForStage(system.id, stage.id, payload), record
    return payload, AnalysisRecord(system.id, stage.id, False, elapsed)


# ---------------------------------------------------------------------------
# Metrics


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


def _tally(results, system_id):
    wins = draws = games = 0
    for result in results:
        if system_id not in (result.black_id, result.white_id):
            continue
        games += 1
        winner = result.outcome.winner
        if winner == TIE:
            draws += 1
        elif (winner == BLACK) == (result.black_id == system_id):
            wins += 1
    return wins, draws, games


def _rate(wins, draws, games) -> float:
    return (wins + 0.5 * draws) / games if games else 0.0


def compute_metrics(
    system_id: str,
    stage_reports,
    public_ids,
    private_ids,
    first_games_window: int = FIRST_GAMES_WINDOW,
) -> MetricVector:
    """P/A/E/G/R for one entrant over the tournament's stage reports.

    P: win rate (draws at 0.5) over private stages. A: the same rate
    restricted to each private stage's first `first_games_window` scheduled
    games. E: mean unused share of the analysis and game budgets, zero on
    any disqualification. G: 1 - clamp(P_public - P_private). R: worst
    per-private-stage P.
    """
    by_id = {report.stage_id: report for report in stage_reports}
    for stage_id in list(public_ids) + list(private_ids):
        if stage_id not in by_id:
            raise ValueError(f"missing stage report for {stage_id!r}")

    private = [by_id[sid] for sid in private_ids]
    public = [by_id[sid] for sid in public_ids]

    wins = draws = games = 0
    window_tallies = [0, 0, 0]
    per_stage_rates = []
    for report in private:
        w, d, g = _tally(report.results, system_id)
        wins, draws, games = wins + w, draws + d, games + g
        per_stage_rates.append(_rate(w, d, g))
        ww, wd, wg = _tally(report.results[:first_games_window], system_id)
        window_tallies[0] += ww
        window_tallies[1] += wd
        window_tallies[2] += wg
    p_private = _rate(wins, draws, games)
    adaptation = _rate(*window_tallies)

    pub_w = pub_d = pub_g = 0
    for report in public:
        w, d, g = _tally(report.results, system_id)
        pub_w, pub_d, pub_g = pub_w + w, pub_d + d, pub_g + g
    p_public = _rate(pub_w, pub_d, pub_g)

    all_reports = public + private
    disqualified = any(
        record.disqualified
        for report in all_reports
        for record in report.analysis
        if record.system_id == system_id
    )
    if disqualified:
        efficiency = 0.0
    else:
        analysis_times = [
            record.elapsed
            for report in all_reports
            for record in report.analysis
            if record.system_id == system_id
        ]
        used_analysis = sum(analysis_times) / len(analysis_times) if analysis_times else 0.0
        game_times = []
        budgets = None
        for report in all_reports:
            budgets = report.budgets
            for result in report.results:
                if result.black_id == system_id:
                    game_times.append(result.per_player_time[0])
                elif result.white_id == system_id:
                    game_times.append(result.per_player_time[1])
        mean_game = sum(game_times) / len(game_times) if game_times else 0.0
        if budgets is None:
            raise ValueError("no stage reports supplied")
        efficiency = _clamp01(
            0.5 * (1.0 - used_analysis / budgets.analysis_seconds)
            + 0.5 * (1.0 - mean_game / budgets.game_seconds)
        )

    generalization = 1.0 - _clamp01(p_public - p_private)
    robustness = min(per_stage_rates) if per_stage_rates else 0.0
    return MetricVector(
        P=p_private, A=adaptation, E=efficiency, G=generalization, R=robustness
    )


def weighted_score(metrics: MetricVector, weights: Optional[dict] = None) -> float:
    if weights is None:
        weights = DEFAULT_WEIGHTS
    if set(weights) != set(DEFAULT_WEIGHTS):
        raise ValueError(f"weights must have keys {sorted(DEFAULT_WEIGHTS)}")
    values = [weights[key] for key in ("wP", "wA", "wE", "wG", "wR")]
    if any(value < 0 for value in values):
        raise ValueError("weights must be nonnegative")
    if abs(sum(values) - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {sum(values)}")
    wp, wa, we, wg, wr = values
    return wp * metrics.P + wa * metrics.A + we * metrics.E + wg * metrics.G + wr * metrics.R


# ---------------------------------------------------------------------------
# Full tournament


@dataclass(frozen=True)
class TournamentReport:
    public_stage_ids: tuple
    private_stage_ids: tuple
    entrant_ids: tuple
    budgets: Budgets
    weights: dict
    seed: int
    timing_mode: str
    first_games_window: int
    stage_reports: tuple
    metrics: dict  # entrant id -> MetricVector
    weighted: dict  # entrant id -> float


def resolve_entrants(entrant_ids):
    """Splits ids into fixed baselines and adaptive systems; unknown -> error."""
    fixed, adaptive = [], []
    for entrant_id in entrant_ids:
        if entrant_id in SYSTEMS:
            adaptive.append(SYSTEMS[entrant_id])
        elif entrant_id in BASELINE_IDS:
            fixed.append((entrant_id, make_baseline(entrant_id)))
        else:
            raise ValueError(f"unknown entrant {entrant_id!r}")
    return fixed, adaptive


def run_tournament(
    public_stage_ids,
    private_stage_ids,
    entrant_ids,
    budgets: Budgets,
    *,
    seed: int = 0,
    timing_mode: str = WALL,
    weights: Optional[dict] = None,
    first_games_window: int = FIRST_GAMES_WINDOW,
) -> TournamentReport:
    """Analysis phase plus round robin on every stage, then metrics.

    Adaptive systems re-analyze every stage (public included) with a fresh
    environment; a disqualified system simply is not entered into that
    stage's round robin.
    """
    validate_mode(timing_mode)
    if weights is None:
        weights = dict(DEFAULT_WEIGHTS)
    weighted_score(MetricVector(0, 0, 0, 0, 0), weights)  # validate early
    duplicate = set(public_stage_ids) & set(private_stage_ids)
    if duplicate:
        raise ValueError(f"stage {sorted(duplicate)[0]!r} is both public and private")
    fixed, adaptive = resolve_entrants(entrant_ids)

    stage_reports = []
    for stage_id in list(public_stage_ids) + list(private_stage_ids):
        stage = stages.get_stage(stage_id)
        records = []
        entered = list(fixed)
        for system in adaptive:
            outcome, record = run_analysis_phase(
                system,
                stage,
                budgets,
                timing_mode=timing_mode,
                seed=derive_seed(seed, "analysis", stage.id, system.id),
            )
            records.append(record)
            if not isinstance(outcome, DisqualifiedForStage):
                entered.append((system.id, outcome.decide))
        if len(entered) >= 2:
            report = run_stage_round_robin(
                stage,
                entered,
                budgets,
                seed=derive_seed(seed, "stage", stage.id),
                timing_mode=timing_mode,
            )
        else:
            entered_ids = tuple(eid for eid, _ in entered)
            report = StageReport(
                stage_id=stage.id,
                budgets=budgets,
                entrant_ids=entered_ids,
                results=(),
                leaderboard=build_leaderboard(entered_ids, ()),
                logs=(),
            )
        stage_reports.append(dataclasses.replace(report, analysis=tuple(records)))

    metrics = {
        entrant_id: compute_metrics(
            entrant_id,
            stage_reports,
            public_stage_ids,
            private_stage_ids,
            first_games_window,
        )
        for entrant_id in entrant_ids
    }
    weighted = {
        entrant_id: weighted_score(vector, weights)
        for entrant_id, vector in metrics.items()
    }
    return TournamentReport(
        public_stage_ids=tuple(public_stage_ids),
        private_stage_ids=tuple(private_stage_ids),
        entrant_ids=tuple(entrant_ids),
        budgets=budgets,
        weights=dict(weights),
        seed=seed,
        timing_mode=timing_mode,
        first_games_window=first_games_window,
        stage_reports=tuple(stage_reports),
        metrics=metrics,
        weighted=weighted,
    )


# ---------------------------------------------------------------------------
# Report document


def _result_document(result: MatchResult) -> dict:
    return {
        "stageId": result.stage_id,
        "blackId": result.black_id,
        "whiteId": result.white_id,
        "winner": result.outcome.winner,
        "blackScore": result.outcome.black_score,
        "whiteScore": result.outcome.white_score,
        "reason": result.outcome.reason.value,
        "gameLength": result.game_length,
        "perPlayerTime": list(result.per_player_time),
    }


def stage_report_document(report: StageReport) -> dict:
    return {
        "stageId": report.stage_id,
        "entrants": list(report.entrant_ids),
        "analysis": [
            {
                "systemId": record.system_id,
                "disqualified": record.disqualified,
                "elapsed": record.elapsed,
                "reason": record.reason,
            }
            for record in report.analysis
        ],
        "games": [_result_document(result) for result in report.results],
        "leaderboard": [
            {
                "strategyId": row.strategy_id,
                "winRate": row.win_rate,
                "wins": row.wins,
                "losses": row.losses,
                "draws": row.draws,
                "games": row.games,
            }
            for row in report.leaderboard
        ],
    }


def report_document(report: TournamentReport) -> dict:
    """Everything needed for an exact re-run, ready for canonical JSON."""
    return {
        "publicStages": list(report.public_stage_ids),
        "privateStages": list(report.private_stage_ids),
        "entrants": list(report.entrant_ids),
        "budgets": {
            "tAnalysis": report.budgets.t_analysis,
            "tGame": report.budgets.t_game,
            "scale": report.budgets.scale,
        },
        "weights": dict(report.weights),
        "seed": report.seed,
        "timingMode": report.timing_mode,
        "firstGamesWindow": report.first_games_window,
        "stages": [stage_report_document(entry) for entry in report.stage_reports],
        "metrics": {
            entrant_id: {**vector.as_dict(), "weightedScore": report.weighted[entrant_id]}
            for entrant_id, vector in report.metrics.items()
        },
    }


def report_to_json(report: TournamentReport) -> str:
    return json.dumps(report_document(report), sort_keys=True, indent=2) + "\n"
