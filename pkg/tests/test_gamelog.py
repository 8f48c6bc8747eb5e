"""Game log formats, replay, and verification.

The Corners/Greedy transcript in tests/data/corners_greedy.txt is the frozen
format fixture: it must parse, and re-rendering the re-simulated game must
reproduce it byte for byte.
"""

import copy
import json
import pathlib
import random
import re

import pytest

from othello_arena import core, gamelog, stages
from othello_arena.core import (
    BLACK,
    WHITE,
    Board,
    GameOutcome,
    OutcomeReason,
    Position,
    RuleSet,
)

DATA_DIR = pathlib.Path(__file__).parent / "data"
FIXTURE_TEXT = (DATA_DIR / "corners_greedy.txt").read_text()


def play_random_game(stage_id, seed, black="Alpha", white="Beta", analysis_data=None):
    """Full random-vs-random game through the engine, recorded as a GameLog."""
    stage = stages.get_stage(stage_id)
    state = stages.initial_state(stage)
    rng = random.Random(seed)
    recorder = gamelog.GameRecorder(
        stage, black, white, state.board, timestamp=gamelog.DETERMINISTIC_TIMESTAMP
    )
    while not state.terminal:
        moves = core.get_valid_moves(state.board, state.current_player, stage.rules)
        state = core.apply_move(state, rng.choice(moves), stage.rules)
        recorder.record(state.history[-1])
    outcome = core.game_outcome(state, stage.rules)
    return recorder.finish(outcome, analysis_data), stage


def forfeit_game(stage_id="stage-0", offender=WHITE, reason=OutcomeReason.TimeForfeit):
    """Plays 6 moves, then the offender forfeits."""
    stage = stages.get_stage(stage_id)
    state = stages.initial_state(stage)
    rng = random.Random(99)
    recorder = gamelog.GameRecorder(
        stage, "Alpha", "Beta", state.board, timestamp=gamelog.DETERMINISTIC_TIMESTAMP
    )
    for _ in range(6):
        moves = core.get_valid_moves(state.board, state.current_player, stage.rules)
        state = core.apply_move(state, rng.choice(moves), stage.rules)
        recorder.record(state.history[-1])
    outcome = core.game_outcome(state, stage.rules, reason=reason, offender=offender)
    return recorder.finish(outcome)


def replay_appendix_game():
    """Re-simulates the fixture transcript into a GameLog."""
    parsed = gamelog.parse_text(FIXTURE_TEXT)
    stage = stages.get_stage("stage-0")
    state = stages.initial_state(stage)
    recorder = gamelog.GameRecorder(
        stage,
        parsed.black_strategy,
        parsed.white_strategy,
        state.board,
        timestamp=gamelog.DETERMINISTIC_TIMESTAMP,
    )
    for _, player, pos in parsed.moves:
        assert state.current_player == player
        state = core.apply_move(state, pos, stage.rules)
        recorder.record(state.history[-1])
    assert state.terminal
    return recorder.finish(core.game_outcome(state, stage.rules)), parsed


class TestTextFormat:
    def test_fixture_parses(self):
        parsed = gamelog.parse_text(FIXTURE_TEXT)
        assert parsed.game_number == 1
        assert parsed.black_strategy == "Corners"
        assert parsed.white_strategy == "Greedy"
        assert parsed.stage_name == "Standard 8x8"
        assert len(parsed.moves) == 60
        assert parsed.moves[0] == ("Corners", BLACK, Position(2, 3))
        assert parsed.moves[1] == ("Greedy", WHITE, Position(2, 2))
        assert (parsed.black_score, parsed.white_score) == (27, 37)
        assert parsed.winner == WHITE
        assert parsed.forfeit_line is None

    def test_fixture_game_is_legal_and_rerenders_identically(self):
        log, parsed = replay_appendix_game()
        assert log.metadata.black_score == 27
        assert log.metadata.white_score == 37
        assert log.metadata.winner == WHITE
        assert gamelog.to_text(log, game_number=1) == FIXTURE_TEXT

    def test_round_trip_surface(self):
        log, stage = play_random_game("stage-6x6", seed=3)
        parsed = gamelog.parse_text(gamelog.to_text(log, game_number=7))
        assert parsed.game_number == 7
        assert parsed.stage_name == stage.name
        assert parsed.black_score == log.metadata.black_score
        assert parsed.white_score == log.metadata.white_score
        assert parsed.winner == log.metadata.winner
        assert [(p, pos) for _, p, pos in parsed.moves] == [
            (m.player, m.position) for m in log.moves
        ]

    def test_forfeit_line(self):
        log = forfeit_game(offender=WHITE)
        text = gamelog.to_text(log)
        lines = text.splitlines()
        assert lines[-2] == "Black wins!"
        assert lines[-1] == "Beta forfeits on time!"
        parsed = gamelog.parse_text(text)
        assert parsed.forfeit_line == "Beta forfeits on time!"
        assert parsed.winner == BLACK

    def test_illegal_move_forfeit_line(self):
        log = forfeit_game(offender=BLACK, reason=OutcomeReason.IllegalMove)
        lines = gamelog.to_text(log).splitlines()
        assert lines[-2] == "White wins!"
        assert lines[-1] == "Alpha forfeits on an illegal move!"

    @pytest.mark.parametrize(
        "mutate, message",
        [
            (lambda ls: ls.__setitem__(0, "== Game 1 =="), "line 1"),
            (lambda ls: ls.__setitem__(1, "Game begins: x vs y"), "line 2"),
            (lambda ls: ls.__setitem__(2, "Corners(B) d3"), "line 3"),
            (lambda ls: ls.__setitem__(2, "Greedy(B): d3"), "line 3"),
            (lambda ls: ls.__setitem__(62, "Game over: 27-37"), "line 63"),
            (lambda ls: ls.__setitem__(63, "White won!"), "line 64"),
            (lambda ls: ls.append("extra trailing junk"), "line 65"),
        ],
    )
    def test_parse_errors_name_the_line(self, mutate, message):
        lines = FIXTURE_TEXT.splitlines()
        mutate(lines)
        with pytest.raises(ValueError, match=message):
            gamelog.parse_text("\n".join(lines) + "\n")

    def test_truncated_transcript(self):
        lines = FIXTURE_TEXT.splitlines()[:10]
        with pytest.raises(ValueError, match="Game over"):
            gamelog.parse_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="empty"):
            gamelog.parse_text("")


class TestStructuredFormat:
    @pytest.mark.parametrize(
        "stage_id",
        ["stage-0", "stage-6x6", "stage-c-squares", "stage-fewer-pieces", "stage-reverse"],
    )
    def test_round_trip_identity(self, stage_id):
        log, _ = play_random_game(stage_id, seed=11)
        doc = gamelog.to_structured(log)
        assert gamelog.from_structured(json.loads(json.dumps(doc))) == log

    def test_document_shape(self):
        log, _ = play_random_game("stage-0", seed=5)
        doc = gamelog.to_structured(log)
        assert set(doc) == {"metadata", "initialBoard", "moves"}
        assert set(doc["metadata"]) == {
            "timestamp",
            "stageId",
            "stageName",
            "blackStrategy",
            "whiteStrategy",
            "blackScore",
            "whiteScore",
            "winner",
            "gameLength",
        }
        assert doc["metadata"]["gameLength"] == len(doc["moves"])
        move = doc["moves"][0]
        assert set(move) == {"player", "position", "capturedCount", "timeSpent", "boardAfter"}
        assert set(move["position"]) == {"row", "col"}
        assert move["boardAfter"][3][3] in (0, 1, 2, 3)

    def test_analysis_data_passthrough(self):
        payload = {"blackSystem": {"analysisTime": 58432, "exploredPositions": 2743}}
        log, _ = play_random_game("stage-0", seed=2, analysis_data=payload)
        doc = gamelog.to_structured(log)
        assert doc["analysisData"] == payload
        assert gamelog.from_structured(doc).analysis_data == payload

    def test_forfeit_round_trip(self):
        log = forfeit_game()
        doc = gamelog.to_structured(log)
        assert doc["metadata"]["forfeit"] == {"player": WHITE, "reason": "time-forfeit"}
        assert gamelog.from_structured(doc) == log

    def test_array_helpers(self):
        logs = [play_random_game("stage-0", seed)[0] for seed in range(3)]
        doc = gamelog.logs_to_document(logs)
        assert isinstance(doc, list) and len(doc) == 3
        assert gamelog.logs_from_document(json.loads(json.dumps(doc))) == logs
        with pytest.raises(ValueError, match="array"):
            gamelog.logs_from_document({"metadata": {}})

    @pytest.mark.parametrize(
        "mutate, message",
        [
            (lambda d: d["metadata"].pop("stageId"), r"metadata\.stageId is missing"),
            (lambda d: d["metadata"].__setitem__("winner", 5), r"metadata\.winner"),
            (lambda d: d["metadata"].__setitem__("blackScore", "27"), r"metadata\.blackScore"),
            (lambda d: d["metadata"].__setitem__("gameLength", 3), "does not match"),
            (lambda d: d["metadata"].__setitem__("extra", 1), r"metadata\.extra"),
            (lambda d: d.__setitem__("bogus", 1), "'bogus'"),
            (lambda d: d.pop("initialBoard"), r"game\.initialBoard is missing"),
            (lambda d: d["initialBoard"][2].__setitem__(0, 7), r"initialBoard\[2\]\[0\]"),
            (lambda d: d["initialBoard"].__setitem__(1, [0, 0]), r"initialBoard\[1\]"),
            (lambda d: d["moves"][0].__setitem__("player", 3), r"moves\[0\]\.player"),
            (lambda d: d["moves"][1].pop("capturedCount"), r"moves\[1\]\.capturedCount"),
            (lambda d: d["moves"][0].__setitem__("position", {"row": 1}), r"moves\[0\]\.position"),
            (lambda d: d["moves"][0].__setitem__("note", "x"), r"moves\[0\]\.note"),
            (lambda d: d["moves"][0]["boardAfter"][0].__setitem__(0, -1), r"boardAfter\[0\]\[0\]"),
            (lambda d: d.__setitem__("analysisData", [1]), "analysisData"),
            (
                lambda d: d["metadata"].__setitem__("forfeit", {"player": 1, "reason": "rage"}),
                r"forfeit\.reason",
            ),
        ],
    )
    def test_validation_errors_name_the_path(self, mutate, message):
        log, _ = play_random_game("stage-0", seed=8)
        doc = gamelog.to_structured(log)
        mutate(doc)
        with pytest.raises(ValueError, match=message):
            gamelog.from_structured(doc)

    def test_filename(self):
        assert gamelog.log_filename("stage-0", 42, "txt") == "game-stage-0-42.txt"
        assert gamelog.log_filename("stage-occlusion", 7, "json") == "game-stage-occlusion-7.json"
        with pytest.raises(ValueError, match="format"):
            gamelog.log_filename("stage-0", 1, "xml")

    def test_utc_timestamp_format(self):
        assert re.fullmatch(
            r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{3}Z", gamelog.utc_timestamp()
        )
        assert gamelog.DETERMINISTIC_TIMESTAMP == "1970-01-01T00:00:00.000Z"


class TestReplay:
    def test_replay_prefixes_match_snapshots(self):
        log, _ = play_random_game("stage-c-squares", seed=4)
        assert gamelog.replay(log, 0) == log.initial_board
        for k in (1, 2, len(log.moves) // 2, len(log.moves)):
            assert gamelog.replay(log, k) == log.moves[k - 1].board_after

    def test_replay_never_trusts_snapshots(self):
        # Corrupt every boardAfter; replay must still rebuild the true boards.
        log, _ = play_random_game("stage-0", seed=6)
        junk = Board.empty(8)
        moves = tuple(
            core.MoveRecord(m.player, m.position, m.captured_count, junk, m.time_spent_ms)
            for m in log.moves
        )
        tampered = gamelog.GameLog(log.metadata, log.initial_board, moves, None)
        assert gamelog.replay(tampered, len(moves)) == log.moves[-1].board_after

    def test_replay_occlusion_rules_resolved_from_catalog(self):
        log, _ = play_random_game("stage-occlusion", seed=12)
        assert gamelog.replay(log, len(log.moves)) == log.moves[-1].board_after

    def test_appendix_first_move(self):
        log, _ = replay_appendix_game()
        board = gamelog.replay(log, 1)
        assert board.get(2, 3) == BLACK
        assert board.get(3, 3) == BLACK  # flipped by d3

    def test_replay_bounds(self):
        log, _ = play_random_game("stage-0", seed=1)
        with pytest.raises(ValueError, match="outside"):
            gamelog.replay(log, len(log.moves) + 1)
        with pytest.raises(ValueError, match="outside"):
            gamelog.replay(log, -1)

    def test_replay_rejects_illegal_move(self):
        log, _ = play_random_game("stage-0", seed=1)
        bad = core.MoveRecord(BLACK, Position(0, 0), 1, log.moves[0].board_after, 0)
        tampered = gamelog.GameLog(log.metadata, log.initial_board, (bad,), None)
        with pytest.raises(ValueError, match="illegal during replay"):
            gamelog.replay(tampered, 1)

    def test_replay_unknown_stage_needs_rules(self):
        log, _ = play_random_game("stage-0", seed=1)
        meta = gamelog.GameLogMetadata(
            **{**log.metadata.__dict__, "stage_id": "stage-custom"}
        )
        renamed = gamelog.GameLog(meta, log.initial_board, log.moves, None)
        with pytest.raises(ValueError, match="pass rules explicitly"):
            gamelog.replay(renamed, 1)
        assert gamelog.replay(renamed, 1, rules=RuleSet()) == log.moves[0].board_after


class TestVerify:
    @pytest.mark.parametrize(
        "stage_id",
        [
            "stage-0",
            "stage-6x6",
            "stage-c-squares",
            "stage-occlusion",
            "stage-fewer-pieces",
            "stage-reverse",
        ],
    )
    def test_generated_logs_verify(self, stage_id):
        for seed in range(3):
            log, _ = play_random_game(stage_id, seed)
            assert gamelog.verify_log(log)

    def test_forfeit_log_verifies(self):
        assert gamelog.verify_log(forfeit_game())

    def structured_tamper(self, log, mutate):
        doc = gamelog.to_structured(log)
        mutate(doc)
        return gamelog.from_structured(doc)

    @pytest.mark.parametrize(
        "mutate",
        [
            # Shape-valid but inconsistent documents must all fail verification.
            lambda d: d["moves"][4]["boardAfter"][0].__setitem__(0, 1),
            lambda d: d["moves"][4].__setitem__("capturedCount", 9),
            lambda d: d["moves"][2].__setitem__("player", d["moves"][2]["player"] % 2 + 1),
            lambda d: d["metadata"].__setitem__("blackScore", d["metadata"]["blackScore"] + 1),
            lambda d: d["metadata"].__setitem__("winner", d["metadata"]["winner"] % 2 + 1),
            lambda d: d["initialBoard"][0].__setitem__(0, 2),
        ],
    )
    def test_tampered_logs_fail(self, mutate):
        log, _ = play_random_game("stage-0", seed=21)
        assert not gamelog.verify_log(self.structured_tamper(log, mutate))

    def test_tampered_move_position_fails(self):
        log, _ = play_random_game("stage-0", seed=21)

        def relocate(doc):
            doc["moves"][5]["position"] = {"row": 0, "col": 0}

        assert not gamelog.verify_log(self.structured_tamper(log, relocate))

    def test_reverse_win_winner_enforced(self):
        log, _ = play_random_game("stage-reverse", seed=13)
        meta = log.metadata
        if meta.winner == 0:
            log, _ = play_random_game("stage-reverse", seed=14)
            meta = log.metadata
        assert gamelog.verify_log(log)
        # The standard-rules winner is the other side; it must be rejected.
        flipped = gamelog.GameLogMetadata(
            **{**meta.__dict__, "winner": core.opponent(meta.winner)}
        )
        assert not gamelog.verify_log(gamelog.GameLog(flipped, log.initial_board, log.moves, None))

    def test_forfeit_winner_must_be_non_offender(self):
        log = forfeit_game(offender=WHITE)
        bad_meta = gamelog.GameLogMetadata(**{**log.metadata.__dict__, "winner": WHITE})
        assert not gamelog.verify_log(gamelog.GameLog(bad_meta, log.initial_board, log.moves, None))

    def test_unknown_stage_without_rules(self):
        log, _ = play_random_game("stage-fewer-pieces", seed=2)
        meta = gamelog.GameLogMetadata(**{**log.metadata.__dict__, "stage_id": "stage-x"})
        moved = gamelog.GameLog(meta, log.initial_board, log.moves, None)
        assert not gamelog.verify_log(moved)
        assert gamelog.verify_log(moved, rules=RuleSet(fewer_pieces_continue=True))
        # Wrong explicit rules must not verify a fewer-pieces turn sequence.
        assert not gamelog.verify_log(moved, rules=RuleSet(reverse_win=True)) or not any(
            a.player == b.player for a, b in zip(log.moves, log.moves[1:])
        )

    def test_appendix_game_verifies(self):
        log, _ = replay_appendix_game()
        assert gamelog.verify_log(log)
