"""Meta-learner tests: self-play, behavior inference, synthesis, budgets."""

from __future__ import annotations

import random

import pytest

from othello_arena import meta, timectl
from othello_arena.baselines import MoveContext, static_weights
from othello_arena.core import BLACK, WHITE, Board, DiscCount, Position, count_discs, opponent
from othello_arena.env import (
    api_evaluate_board,
    api_get_valid_moves,
    api_simulate_move,
    make_env,
)
from othello_arena.meta import (
    NUM_SIM_GAMES,
    AnalysisBudget,
    GeneratedStrategy,
    ObservedBehaviors,
    OpeningBookEntry,
    PositionStats,
    SimulationGameLog,
    analyze_stage,
    build_opening_book,
    build_value_matrix,
    decision_tier,
    infer_behaviors,
    occlusion_probe,
    run_self_play,
    synthesize_strategy,
)
from othello_arena.stages import get_stage, public_view


def stage_setup(stage_id, timing_mode=timectl.DETERMINISTIC):
    stage = get_stage(stage_id)
    return public_view(stage), make_env(stage, timing_mode)


def make_ctx(env, board, player, moves, budget=1e9, seed=0):
    return MoveContext(
        board=board,
        player=player,
        valid_moves=moves,
        env=env,
        rng=random.Random(seed),
        remaining_game_budget=budget,
    )


class TestBudget:
    def test_defaults(self):
        budget = AnalysisBudget()
        assert budget.total == 60.0
        assert budget.safety_buffer == pytest.approx(5.0)
        assert budget.usable == pytest.approx(55.0)
        assert (budget.alpha, budget.beta, budget.gamma) == (0.2, 0.3, 0.5)

    def test_scaled(self):
        budget = AnalysisBudget().scaled(0.1)
        assert budget.total == pytest.approx(6.0)
        assert budget.usable == pytest.approx(5.5)

    def test_validation(self):
        with pytest.raises(ValueError, match="sum to 1"):
            AnalysisBudget(alpha=0.5, beta=0.5, gamma=0.5)
        with pytest.raises(ValueError, match="nonnegative"):
            AnalysisBudget(alpha=-0.1, beta=0.6, gamma=0.5)
        with pytest.raises(ValueError, match="safetyBuffer"):
            AnalysisBudget(total=10.0, safety_buffer=10.0)
        with pytest.raises(ValueError, match="positive"):
            AnalysisBudget(total=0.0)


class TestSelfPlay:
    def test_exact_game_count_under_far_deadline(self):
        sanitized, env = stage_setup("stage-0")
        logs, stats = run_self_play(env, sanitized, deadline=1e9, max_games=10,
                                    rng=random.Random(1))
        assert len(logs) == 10
        assert all(len(log.moves) <= meta.MAX_MOVES_PER_GAME for log in logs)

    def test_immediate_deadline_yields_nothing(self):
        sanitized, env = stage_setup("stage-0")
        logs, stats = run_self_play(env, sanitized, deadline=-1.0, max_games=10)
        assert logs == []
        assert all(
            stats.cell(r, c).plays == 0 for r in range(8) for c in range(8)
        )

    def test_stats_match_move_records(self):
        sanitized, env = stage_setup("stage-6x6")
        logs, stats = run_self_play(env, sanitized, deadline=1e9, max_games=15,
                                    rng=random.Random(2))
        plays = {}
        wins = {}
        for log in logs:
            for player, pos, _captured in log.moves:
                plays[pos] = plays.get(pos, 0) + 1
                if log.winner == player:
                    wins[pos] = wins.get(pos, 0) + 1
        for r in range(6):
            for c in range(6):
                cell = stats.cell(r, c)
                assert cell.plays == plays.get(Position(r, c), 0)
                assert cell.wins == wins.get(Position(r, c), 0)
                assert cell.wins <= cell.plays
                assert cell.black_plays + cell.white_plays == cell.plays

    def test_winner_is_env_declared_on_reverse_stage(self):
        sanitized, env = stage_setup("stage-reverse")
        logs, _ = run_self_play(env, sanitized, deadline=1e9, max_games=10,
                                rng=random.Random(3))
        decided = 0
        for log in logs:
            scores = log.final_scores
            if log.winner == BLACK:
                assert scores.black < scores.white
                decided += 1
            elif log.winner == WHITE:
                assert scores.white < scores.black
                decided += 1
        assert decided > 0

    def test_deterministic_given_seed(self):
        sanitized, _ = stage_setup("stage-0")
        _, env_a = stage_setup("stage-0")
        _, env_b = stage_setup("stage-0")
        logs_a, _ = run_self_play(env_a, sanitized, 1e9, 5, rng=random.Random(7))
        logs_b, _ = run_self_play(env_b, sanitized, 1e9, 5, rng=random.Random(7))
        assert [log.moves for log in logs_a] == [log.moves for log in logs_b]


def synthetic_log(players, winner=0, black=10, white=10):
    log = SimulationGameLog()
    log.moves = [(p, Position(0, i % 8), 1) for i, p in enumerate(players)]
    log.final_scores = DiscCount(black, white, 64 - black - white, 0)
    log.winner = winner
    return log


class TestBehaviors:
    def test_frequency_arithmetic(self):
        # 11 moves -> 10 transitions, 2 of them same-player.
        players = [1, 2, 1, 1, 2, 1, 2, 2, 1, 2, 1]
        sanitized, env = stage_setup("stage-0")
        behaviors = infer_behaviors([synthetic_log(players)], env, sanitized)
        assert behaviors.consecutive_turn_frequency == pytest.approx(0.2)
        assert behaviors.consecutive_turn_observed

    def test_below_threshold_not_observed(self):
        players = [1, 2] * 30 + [1, 1]  # 1 same-player pair in 61 transitions
        sanitized, env = stage_setup("stage-0")
        behaviors = infer_behaviors([synthetic_log(players)], env, sanitized)
        assert behaviors.consecutive_turn_frequency < 0.05
        assert not behaviors.consecutive_turn_observed

    def test_short_games_skipped(self):
        sanitized, env = stage_setup("stage-0")
        behaviors = infer_behaviors([synthetic_log([1])], env, sanitized)
        assert behaviors.consecutive_turn_frequency == 0.0

    def test_black_bias(self):
        players = [1, 1, 1, 1, 2, 1, 2]
        sanitized, env = stage_setup("stage-0")
        behaviors = infer_behaviors([synthetic_log(players)], env, sanitized)
        assert behaviors.consecutive_turn_bias_black == pytest.approx(1.0)
        assert behaviors.consecutive_turn_bias_white == 0.0

    def test_reversed_win_detection(self):
        sanitized, env = stage_setup("stage-0")
        log = synthetic_log([1, 2, 1, 2], winner=WHITE, black=20, white=10)
        behaviors = infer_behaviors([log], env, sanitized)
        assert behaviors.win_condition_reversed_observed
        normal = synthetic_log([1, 2, 1, 2], winner=BLACK, black=20, white=10)
        behaviors = infer_behaviors([normal], env, sanitized)
        assert not behaviors.win_condition_reversed_observed

    def test_standard_stage_all_flags_false(self):
        sanitized, env = stage_setup("stage-0")
        logs, _ = run_self_play(env, sanitized, 1e9, 12, rng=random.Random(4))
        behaviors = infer_behaviors(logs, env, sanitized)
        assert not behaviors.consecutive_turn_observed
        assert not behaviors.capture_through_blocked_observed
        assert not behaviors.win_condition_reversed_observed

    def test_behaviors_document_round_trip(self):
        behaviors = ObservedBehaviors(
            consecutive_turn_observed=True,
            consecutive_turn_frequency=0.25,
            consecutive_turn_bias_black=0.8,
            capture_through_blocked_observed=True,
        )
        assert ObservedBehaviors.from_dict(behaviors.as_dict()) == behaviors


class TestOcclusionProbe:
    def test_true_on_occlusion_stage(self):
        sanitized, env = stage_setup("stage-occlusion")
        assert occlusion_probe(env, sanitized) is True

    def test_false_on_plain_blocked_stage(self):
        sanitized, env = stage_setup("stage-c-squares")
        assert occlusion_probe(env, sanitized) is False

    def test_no_blocked_cells_means_no_calls(self):
        sanitized, env = stage_setup("stage-0")
        assert occlusion_probe(env, sanitized) is False
        assert env.usage.total_calls == 0


class TestValueMatrix:
    def frozen_stats(self, size=8, cells=()):
        stats = PositionStats(size)
        for (r, c), plays, wins in cells:
            stats.plays[r][c] = plays
            stats.wins[r][c] = wins
        return stats

    def test_blend_example(self):
        stats = self.frozen_stats(cells=[((0, 0), 10, 8)])
        matrix = build_value_matrix(stats, 8, ObservedBehaviors())
        # 120*0.7 + (0.8-0.5)*100*1.0*0.3 = 84 + 9 = 93
        assert matrix[0][0] == 93

    def test_low_play_cells_keep_base(self):
        stats = self.frozen_stats(cells=[((0, 0), 2, 2)])
        matrix = build_value_matrix(stats, 8, ObservedBehaviors())
        assert matrix[0][0] == 120
        assert matrix[1][1] == -40

    def test_confidence_scales_adjustment(self):
        stats = self.frozen_stats(cells=[((3, 3), 5, 5)])
        matrix = build_value_matrix(stats, 8, ObservedBehaviors())
        # base 3; conf 0.5; adjustment 25; 3*0.7 + 25*0.3 = 9.6 -> 10
        assert matrix[3][3] == 10

    def test_reversed_negates_everything(self):
        stats = self.frozen_stats(cells=[((0, 0), 10, 8)])
        normal = build_value_matrix(stats, 8, ObservedBehaviors())
        flipped = build_value_matrix(
            stats, 8, ObservedBehaviors(win_condition_reversed_observed=True)
        )
        for r in range(8):
            for c in range(8):
                assert flipped[r][c] == -normal[r][c]
        assert flipped[0][0] == -93

    def test_blocked_cells_zeroed(self):
        stats = self.frozen_stats()
        matrix = build_value_matrix(
            stats, 8, ObservedBehaviors(), blocked=(Position(0, 1), Position(6, 0))
        )
        assert matrix[0][1] == 0
        assert matrix[6][0] == 0
        assert matrix[0][0] == 120

    def test_six_by_six_base(self):
        matrix = build_value_matrix(PositionStats(6), 6, ObservedBehaviors())
        assert matrix == static_weights(6)


def book_log(moves, winner):
    log = SimulationGameLog()
    log.moves = [(p, Position(r, c), 1) for p, r, c in moves]
    log.final_scores = DiscCount(10, 10, 44, 0)
    log.winner = winner
    return log


class TestOpeningBook:
    SEQ_A = [(1, 2, 3), (2, 2, 2), (1, 3, 2), (2, 4, 2)]
    SEQ_B = [(1, 4, 5), (2, 5, 5), (1, 5, 4), (2, 3, 3)]

    def test_threshold_filtering(self):
        logs = [book_log(self.SEQ_A, BLACK)] * 2 + [book_log(self.SEQ_A, WHITE)]
        book = build_opening_book(logs)
        # 2/3 = 0.667 > 0.6 with 3 games: kept.
        assert len(book) == 1
        assert book[0].games == 3
        assert book[0].win_rate == pytest.approx(2 / 3)
        assert book[0].sequence[0] == (1, Position(2, 3))

    def test_single_game_dropped(self):
        book = build_opening_book([book_log(self.SEQ_A, BLACK)])
        assert book == []

    def test_rate_at_threshold_dropped(self):
        logs = [book_log(self.SEQ_A, BLACK), book_log(self.SEQ_A, WHITE)]
        assert build_opening_book(logs) == []  # 0.5 not > 0.6

    def test_short_games_skipped(self):
        logs = [book_log(self.SEQ_A[:3], BLACK)] * 5
        assert build_opening_book(logs) == []

    def test_top_three_by_rate(self):
        logs = []
        rates = [(10, 10), (10, 9), (10, 8), (10, 7), (3, 3)]
        for i, (games, wins) in enumerate(rates):
            seq = [(1, i, 0), (2, i, 1), (1, i, 2), (2, i, 3)]
            logs += [book_log(seq, BLACK)] * wins
            logs += [book_log(seq, WHITE)] * (games - wins)
        book = build_opening_book(logs)
        assert len(book) == 3
        assert [entry.win_rate for entry in book] == [1.0, 1.0, 0.9]
        # The tie between the two rate-1.0 entries keeps first-seen order.
        assert book[0].sequence[0][1] == Position(0, 0)
        assert book[1].sequence[0][1] == Position(4, 0)

    def test_six_move_key(self):
        long_moves = [(1, 0, i) for i in range(8)]
        logs = [book_log(long_moves, BLACK)] * 3
        book = build_opening_book(logs)
        assert len(book) == 1
        assert len(book[0].sequence) == 6


def plain_strategy(matrix=None, book=(), behaviors=None, size=8, bonus=5):
    if matrix is None:
        matrix = tuple(tuple(0 for _ in range(size)) for _ in range(size))
    return synthesize_strategy(matrix, list(book), behaviors or ObservedBehaviors(), size, bonus)


def oracle_score_move(strategy, env, board, player, pos):
    sim = api_simulate_move(env, board, player, pos.row, pos.col)
    score = float(strategy.matrix[pos.row][pos.col])
    score += sim.captured_count * strategy.capture_bonus
    evaluation = api_evaluate_board(env, sim.resulting_board, player)
    if strategy.behaviors.win_condition_reversed_observed:
        score += -evaluation.mobility_score * 5
    else:
        score += evaluation.mobility_score * 10
    replies = api_get_valid_moves(env, sim.resulting_board, opponent(player))
    if replies:
        worst = min(
            api_evaluate_board(
                env,
                api_simulate_move(env, sim.resulting_board, opponent(player), m.row, m.col).resulting_board,
                player,
            ).total_score
            for m in replies
        )
        score += worst * -0.5
    else:
        score += 100
    return score


def random_midgame(stage_id, seed, plies=6):
    stage = get_stage(stage_id)
    sanitized, env = stage_setup(stage_id, timectl.WALL)
    rng = random.Random(seed)
    board = sanitized.initial_board
    player = sanitized.start_player
    for _ in range(plies):
        moves = api_get_valid_moves(env, board, player)
        if not moves:
            break
        pos = moves[rng.randrange(len(moves))]
        board = api_simulate_move(env, board, player, pos.row, pos.col).resulting_board
        nxt = api_next_player(env, board, player)
        if nxt is None:
            break
        player = nxt
    return board, player


from othello_arena.env import api_next_player  # noqa: E402


class TestGeneratedStrategy:
    def test_full_scoring_matches_oracle(self):
        strategy = plain_strategy(matrix=static_weights(8))
        for seed in range(6):
            board, player = random_midgame("stage-0", seed)
            _, env = stage_setup("stage-0", timectl.WALL)
            moves = api_get_valid_moves(env, board, player)
            if not moves:
                continue
            ctx = make_ctx(env, board, player, moves)
            choice = strategy.decide(ctx)
            scores = {pos: oracle_score_move(strategy, env, board, player, pos) for pos in moves}
            assert scores[choice] == max(scores.values())

    def test_reversed_scoring_matches_oracle(self):
        strategy = plain_strategy(
            matrix=tuple(tuple(-v for v in row) for row in static_weights(8)),
            behaviors=ObservedBehaviors(win_condition_reversed_observed=True),
        )
        for seed in range(4):
            board, player = random_midgame("stage-reverse", seed)
            _, env = stage_setup("stage-reverse", timectl.WALL)
            moves = api_get_valid_moves(env, board, player)
            if not moves:
                continue
            ctx = make_ctx(env, board, player, moves)
            choice = strategy.decide(ctx)
            scores = {pos: oracle_score_move(strategy, env, board, player, pos) for pos in moves}
            assert scores[choice] == max(scores.values())

    def test_book_move_preferred_early(self):
        entry = OpeningBookEntry(((WHITE, Position(2, 4)), (BLACK, Position(2, 3))), 0.8, 4)
        matrix = [[0] * 8 for _ in range(8)]
        matrix[5][4] = 500  # would win on scoring alone
        strategy = plain_strategy(matrix=tuple(tuple(r) for r in matrix), book=(entry,))
        sanitized, env = stage_setup("stage-0", timectl.WALL)
        board = sanitized.initial_board
        assert count_discs(board).black + count_discs(board).white < 12
        moves = api_get_valid_moves(env, board, BLACK)
        choice = strategy.decide(make_ctx(env, board, BLACK, moves))
        assert choice == Position(2, 3)

    def test_book_ignored_when_move_invalid(self):
        entry = OpeningBookEntry(((BLACK, Position(0, 0)),), 0.9, 5)
        strategy = plain_strategy(matrix=static_weights(8), book=(entry,))
        sanitized, env = stage_setup("stage-0", timectl.WALL)
        board = sanitized.initial_board
        moves = api_get_valid_moves(env, board, BLACK)
        choice = strategy.decide(make_ctx(env, board, BLACK, moves))
        assert choice in moves

    def test_matrix_tier_uses_no_api_calls(self):
        matrix = [[0] * 8 for _ in range(8)]
        matrix[4][5] = 50
        strategy = plain_strategy(matrix=tuple(tuple(r) for r in matrix))
        sanitized, env = stage_setup("stage-0", timectl.WALL)
        board = sanitized.initial_board
        moves = api_get_valid_moves(env, board, BLACK)
        before = env.usage.total_calls
        choice = strategy.decide(make_ctx(env, board, BLACK, moves, budget=0.0))
        assert env.usage.total_calls == before
        assert choice == Position(4, 5)

    def test_tier_thresholds(self):
        sanitized, env = stage_setup("stage-0", timectl.DETERMINISTIC)
        board = sanitized.initial_board
        moves = api_get_valid_moves(env, board, BLACK)
        assert decision_tier(make_ctx(env, board, BLACK, moves, budget=1e9)) == meta.FULL_TIER
        assert decision_tier(make_ctx(env, board, BLACK, moves, budget=0.0)) == meta.MATRIX_TIER

    def test_document_round_trip(self):
        entry = OpeningBookEntry(((BLACK, Position(2, 3)), (WHITE, Position(2, 2))), 0.75, 4)
        strategy = plain_strategy(
            matrix=static_weights(8),
            book=(entry,),
            behaviors=ObservedBehaviors(win_condition_reversed_observed=True),
            bonus=8,
        )
        doc = strategy.to_document()
        assert doc["captureBonus"] == 8
        assert GeneratedStrategy.from_document(doc) == strategy


class TestAnalyzeStage:
    def test_returns_strategy_and_respects_clock(self):
        budget = AnalysisBudget(total=0.5)
        sanitized, env = stage_setup("stage-0")
        start = env.elapsed()
        strategy = analyze_stage(sanitized, env, budget, seed=1)
        assert isinstance(strategy, GeneratedStrategy)
        assert env.elapsed() - start <= budget.total
        assert strategy.board_size == 8
        assert strategy.capture_bonus in meta.CANDIDATE_CAPTURE_BONUSES

    def test_deterministic_repeatability(self):
        budget = AnalysisBudget(total=0.4)
        results = []
        for _ in range(2):
            sanitized, env = stage_setup("stage-6x6")
            results.append(analyze_stage(sanitized, env, budget, seed=9))
        assert results[0] == results[1]

    def test_occlusion_stage_flag_and_blocked_zeroing(self):
        budget = AnalysisBudget(total=0.4)
        sanitized, env = stage_setup("stage-occlusion")
        strategy = analyze_stage(sanitized, env, budget, seed=2)
        assert strategy.behaviors.capture_through_blocked_observed
        for pos in sanitized.initial_board.blocked_positions():
            assert strategy.matrix[pos.row][pos.col] == 0

    def test_plain_blocked_stage_flag_false(self):
        budget = AnalysisBudget(total=0.4)
        sanitized, env = stage_setup("stage-c-squares")
        strategy = analyze_stage(sanitized, env, budget, seed=2)
        assert not strategy.behaviors.capture_through_blocked_observed

    def test_fewer_pieces_detection(self):
        budget = AnalysisBudget(total=1.0)
        sanitized, env = stage_setup("stage-fewer-pieces")
        strategy = analyze_stage(sanitized, env, budget, seed=3)
        assert strategy.behaviors.consecutive_turn_observed
        assert strategy.behaviors.consecutive_turn_frequency > 0.05

    def test_reverse_stage_adaptation(self):
        budget = AnalysisBudget(total=0.6)
        sanitized, env = stage_setup("stage-reverse")
        strategy = analyze_stage(sanitized, env, budget, seed=4)
        assert strategy.behaviors.win_condition_reversed_observed
        assert strategy.matrix[0][0] < 0
