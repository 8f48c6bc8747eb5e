"""CLI behavior, driven in-process through main(argv)."""

import json

import pytest

from othello_arena import cli, gamelog, stages
from othello_arena.core import WHITE
from othello_arena.meta import GeneratedStrategy


def run_cli(*argv):
    return cli.main(list(argv))


class TestStages:
    def test_table(self, capsys):
        assert run_cli("stages") == 0
        out = capsys.readouterr().out
        lines = [line for line in out.splitlines() if line.strip()]
        assert len(lines) == 7
        first = lines[0].split()
        assert first[0] == "stage-0"
        assert "Standard 8x8" in lines[0]
        assert lines[0].rstrip().endswith("public")
        assert lines[3].rstrip().endswith("private")

    def test_json_documents_round_trip(self, capsys):
        assert run_cli("stages", "--json") == 0
        docs = json.loads(capsys.readouterr().out)
        assert len(docs) == 7
        for doc in docs:
            stage = stages.load_stage(doc)
            assert stage == stages.get_stage(doc["id"])


class TestPlay:
    def test_writes_both_formats(self, tmp_path, capsys):
        code = run_cli(
            "play", "stage-6x6", "corners", "greedy",
            "--seed", "5", "--timing", "deterministic", "--t-game", "0.5",
            "--out", str(tmp_path),
        )
        assert code == 0
        text_path = tmp_path / "game-stage-6x6-5.txt"
        json_path = tmp_path / "game-stage-6x6-5.json"
        assert text_path.exists() and json_path.exists()
        parsed = gamelog.parse_text(text_path.read_text())
        assert parsed.black_strategy == "Corners"
        logs = gamelog.logs_from_document(json.loads(json_path.read_text()))
        assert len(logs) == 1
        assert gamelog.verify_log(logs[0])
        assert capsys.readouterr().out == text_path.read_text()

    def test_multiple_seeds_number_games(self, tmp_path):
        code = run_cli(
            "play", "stage-6x6", "random", "random",
            "--seeds", "1,2", "--timing", "deterministic", "--t-game", "0.5",
            "--out", str(tmp_path),
        )
        assert code == 0
        text = (tmp_path / "game-stage-6x6-1.txt").read_text()
        assert "=== Game 1 ===" in text and "=== Game 2 ===" in text
        logs = gamelog.logs_from_document(
            json.loads((tmp_path / "game-stage-6x6-1.json").read_text())
        )
        assert len(logs) == 2 and all(gamelog.verify_log(log) for log in logs)

    def test_slow_strategy_forfeits(self, tmp_path):
        code = run_cli(
            "play", "stage-0", "smart-lv3-slow", "greedy",
            "--t-game", "0.05", "--seed", "3", "--out", str(tmp_path),
        )
        assert code == 0
        logs = gamelog.logs_from_document(
            json.loads((tmp_path / "game-stage-0-3.json").read_text())
        )
        metadata = logs[0].metadata
        assert metadata.forfeit_reason == "time-forfeit"
        assert metadata.winner == WHITE
        text = (tmp_path / "game-stage-0-3.txt").read_text()
        assert text.rstrip().endswith("forfeits on time!")

    def test_unknown_stage(self, tmp_path, capsys):
        assert run_cli("play", "stage-nope", "random", "random", "--out", str(tmp_path)) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_strategy(self, tmp_path, capsys):
        assert run_cli("play", "stage-0", "alphazero", "random", "--out", str(tmp_path)) == 1
        assert "error:" in capsys.readouterr().err

    def test_meta_learner_entrant(self, tmp_path):
        code = run_cli(
            "play", "stage-6x6", "meta-learner", "random",
            "--t-analysis", "0.4", "--t-game", "0.5",
            "--timing", "deterministic", "--out", str(tmp_path),
        )
        assert code == 0
        logs = gamelog.logs_from_document(
            json.loads((tmp_path / "game-stage-6x6-0.json").read_text())
        )
        assert logs[0].metadata.black_strategy == "Meta-Learner"


class TestTournament:
    def args(self, out, *extra):
        return (
            "tournament", "greedy", "random", "corners", "positional",
            "--private", "stage-6x6",
            "--t-analysis", "0.5", "--t-game", "0.5",
            "--timing", "deterministic", "--seed", "9",
            "--out", str(out), *extra,
        )

    def test_game_count_and_report(self, tmp_path, capsys):
        assert run_cli(*self.args(tmp_path)) == 0
        report = json.loads((tmp_path / "tournament-report-9.json").read_text())
        stage_entry = report["stages"][0]
        assert len(stage_entry["games"]) == 12
        out = capsys.readouterr().out
        assert "Stage stage-6x6" in out and "Entrant scores:" in out
        logs = gamelog.logs_from_document(
            json.loads((tmp_path / "game-stage-6x6-9.json").read_text())
        )
        assert len(logs) == 12 and all(gamelog.verify_log(log) for log in logs)

    def test_p_only_weights_rank_by_p(self, tmp_path):
        assert run_cli(*self.args(tmp_path, "--weights", "1,0,0,0,0")) == 0
        report = json.loads((tmp_path / "tournament-report-9.json").read_text())
        metrics = report["metrics"]
        for entry in metrics.values():
            assert entry["weightedScore"] == pytest.approx(entry["P"])

    def test_deterministic_rerun_byte_identical(self, tmp_path):
        first_dir = tmp_path / "a"
        second_dir = tmp_path / "b"
        assert run_cli(*self.args(first_dir)) == 0
        assert run_cli(*self.args(second_dir)) == 0
        first = (first_dir / "tournament-report-9.json").read_bytes()
        second = (second_dir / "tournament-report-9.json").read_bytes()
        assert first == second
        assert (first_dir / "game-stage-6x6-9.json").read_bytes() == (
            second_dir / "game-stage-6x6-9.json"
        ).read_bytes()

    def test_unknown_entrant(self, tmp_path, capsys):
        code = run_cli(
            "tournament", "greedy", "nobody", "--private", "stage-6x6",
            "--out", str(tmp_path),
        )
        assert code == 1
        assert "unknown entrant" in capsys.readouterr().err


class TestAnalyze:
    def test_meta_learner_occlusion_probe_in_transcript(self, tmp_path, capsys):
        code = run_cli(
            "analyze", "meta-learner", "stage-occlusion",
            "--t-analysis", "1.0", "--timing", "deterministic", "--seed", "2",
            "--out", str(tmp_path),
        )
        assert code == 0
        transcript = json.loads(
            (tmp_path / "analysis-meta-learner-stage-occlusion-2.json").read_text()
        )
        assert transcript["behaviors"]["captureThroughBlockedCellsObserved"] is True
        assert transcript["disqualified"] is False
        assert transcript["elapsed"] <= 1.0
        strategy_doc = json.loads(
            (tmp_path / "strategy-meta-learner-stage-occlusion-2.json").read_text()
        )
        strategy = GeneratedStrategy.from_document(strategy_doc)
        assert strategy.board_size == 8

    def test_stalling_plugin_times_out(self, tmp_path, capsys, monkeypatch):
        module_dir = tmp_path / "mods"
        module_dir.mkdir()
        (module_dir / "stall_system.py").write_text(
            "import time\n\ndef analyze(sanitized, env, budget, seed):\n"
            "    time.sleep(60)\n"
        )
        monkeypatch.syspath_prepend(str(module_dir))
        code = run_cli(
            "analyze", "stall_system:analyze", "stage-0",
            "--t-analysis", "0.2", "--out", str(tmp_path),
        )
        assert code == 1
        assert "disqualified" in capsys.readouterr().err
        transcript = json.loads(
            (tmp_path / "analysis-stall_system-analyze-stage-0-0.json").read_text()
        )
        assert transcript["disqualified"] is True
        assert transcript["reason"] == "timeout"

    def test_unknown_system(self, tmp_path, capsys):
        assert run_cli("analyze", "nobody", "stage-0", "--out", str(tmp_path)) == 1
        assert "unknown system" in capsys.readouterr().err


@pytest.fixture()
def played_log(tmp_path):
    assert (
        run_cli(
            "play", "stage-c-squares", "greedy", "positional",
            "--seed", "4", "--timing", "deterministic", "--t-game", "0.5",
            "--out", str(tmp_path),
        )
        == 0
    )
    return tmp_path / "game-stage-c-squares-4.json"


class TestReplay:
    def test_initial_position(self, played_log, capsys):
        assert run_cli("replay", str(played_log), "--move", "0") == 0
        out = capsys.readouterr().out
        assert "Initial position" in out
        # Blocked c-square cells render as '#'.
        assert "#" in out
        assert " a b c d e f g h" in out

    def test_final_position_default(self, played_log, capsys):
        assert run_cli("replay", str(played_log)) == 0
        out = capsys.readouterr().out
        assert "Greedy(B) " in out or "Positional(W) " in out
        assert "Move " in out

    def test_move_header(self, played_log, capsys):
        assert run_cli("replay", str(played_log), "--move", "1") == 0
        out = capsys.readouterr().out
        assert "Move 1/" in out and "Greedy(B)" in out

    def test_out_of_range(self, played_log, capsys):
        assert run_cli("replay", str(played_log), "--move", "999") == 1
        assert "outside" in capsys.readouterr().err

    def test_verify_pass_and_fail(self, played_log, tmp_path, capsys):
        assert run_cli("replay", str(played_log), "--verify") == 0
        assert "verify: PASS" in capsys.readouterr().out
        doc = json.loads(played_log.read_text())
        doc[0]["metadata"]["blackScore"] += 1
        bad = tmp_path / "tampered.json"
        bad.write_text(json.dumps(doc))
        assert run_cli("replay", str(bad), "--verify") == 1
        assert "verify: FAIL" in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        assert run_cli("replay", str(tmp_path / "nope.json")) == 1
        assert "error:" in capsys.readouterr().err

    def test_game_selector(self, tmp_path, capsys):
        assert (
            run_cli(
                "play", "stage-6x6", "random", "random", "--seeds", "1,2",
                "--timing", "deterministic", "--t-game", "0.5", "--out", str(tmp_path),
            )
            == 0
        )
        capsys.readouterr()
        path = tmp_path / "game-stage-6x6-1.json"
        assert run_cli("replay", str(path), "--game", "2", "--move", "0") == 0
        assert "Game 2:" in capsys.readouterr().out
        assert run_cli("replay", str(path), "--game", "5") == 1


class TestRenderBoard:
    def test_glyphs(self):
        board = stages.initial_board(stages.get_stage("stage-c-squares"))
        text = cli.render_board(board)
        lines = text.splitlines()
        assert lines[0] == "   a b c d e f g h"
        assert lines[1] == " 1 . # . . . . . ."
        assert lines[4].startswith(" 4 . . . W B . . .") or "W B" in lines[4]
