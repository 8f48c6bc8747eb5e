"""Operator command line: list stages, play games, run tournaments, run
analysis, replay logs, and launch the HTTP service.

All outputs land in --out (or $ARENA_OUT, or the working directory) and are
written atomically. Deterministic timing mode plus fixed seeds makes every
command reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys
import time

from . import gamelog, meta, stages, tournament
from .baselines import BASELINE_IDS, display_name, make_baseline
from .core import BLACK, WHITE, Board, position_to_notation
from .stages import builtin_stages, get_stage, is_public, serialize_stage
from .timectl import TIMING_MODES, WALL
from .tournament import (
    AdaptiveSystem,
    Budgets,
    DisqualifiedForStage,
    run_analysis_phase,
    run_game,
    run_tournament,
)

_GLYPHS = {0: ".", 1: "B", 2: "W", 3: "#"}


def render_board(board: Board) -> str:
    """Monospace grid: `.` empty, `B` black, `W` white, `#` blocked."""
    header = "   " + " ".join(chr(ord("a") + c) for c in range(board.size))
    lines = [header]
    for r in range(board.size):
        cells = " ".join(_GLYPHS[board.get(r, c)] for c in range(board.size))
        lines.append(f"{r + 1:>2} {cells}")
    return "\n".join(lines)


def _out_dir(args) -> pathlib.Path:
    root = args.out or os.environ.get("ARENA_OUT") or "."
    path = pathlib.Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_atomic(path: pathlib.Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _budgets(args) -> Budgets:
    return Budgets(t_analysis=args.t_analysis, t_game=args.t_game, scale=args.scale)


def _weights(args):
    if args.weights is None:
        return None
    parts = [part.strip() for part in args.weights.split(",")]
    if len(parts) != 5:
        raise ValueError("--weights needs five comma-separated values (wP,wA,wE,wG,wR)")
    values = [float(part) for part in parts]
    return dict(zip(("wP", "wA", "wE", "wG", "wR"), values))


def _seeds(args) -> list:
    if getattr(args, "seeds", None):
        return [int(part) for part in args.seeds.split(",")]
    return [args.seed]


def _stage_list(text: str) -> list:
    return [part.strip() for part in text.split(",") if part.strip()]


def _resolve_system(spec: str) -> AdaptiveSystem:
    """Builtin system id, or `module:attribute` naming an analyze callable."""
    if spec in tournament.SYSTEMS:
        return tournament.SYSTEMS[spec]
    if ":" in spec:
        module_name, _, attr = spec.partition(":")
        import importlib

        fn = getattr(importlib.import_module(module_name), attr)
        return AdaptiveSystem(spec, fn)
    raise ValueError(f"unknown system {spec!r} (builtin: {sorted(tournament.SYSTEMS)})")


def _player(entrant_id, stage, budgets, timing_mode, seed):
    """Decision procedure for an entrant id; adaptive ids analyze first."""
    if entrant_id in tournament.SYSTEMS:
        outcome, record = run_analysis_phase(
            tournament.SYSTEMS[entrant_id],
            stage,
            budgets,
            timing_mode=timing_mode,
            seed=seed,
        )
        if isinstance(outcome, DisqualifiedForStage):
            raise ValueError(
                f"{entrant_id} was disqualified on {stage.id}: {outcome.reason}"
            )
        return outcome.decide
    return make_baseline(entrant_id)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_stages(args) -> int:
    catalog = builtin_stages()
    if args.json:
        docs = [serialize_stage(stage) for stage in catalog]
        print(json.dumps(docs, indent=2))
        return 0
    width = max(len(stage.id) for stage in catalog)
    name_width = max(len(stage.name) for stage in catalog)
    for stage in catalog:
        flag = "public" if is_public(stage.id) else "private"
        print(f"{stage.id:<{width}}  {stage.name:<{name_width}}  {flag}")
    return 0


def cmd_play(args) -> int:
    stage = get_stage(args.stage)
    budgets = _budgets(args)
    out = _out_dir(args)
    seeds = _seeds(args)

    logs = []
    texts = []
    for number, seed in enumerate(seeds, start=1):
        black = _player(args.black, stage, budgets, args.timing, tournament.derive_seed(seed, "analysis", BLACK))
        white = _player(args.white, stage, budgets, args.timing, tournament.derive_seed(seed, "analysis", WHITE))
        result, log = run_game(
            stage,
            black,
            white,
            budgets,
            seed,
            black_id=args.black,
            white_id=args.white,
            timing_mode=args.timing,
        )
        logs.append(log)
        texts.append(gamelog.to_text(log, game_number=number))

    text_blob = "\n".join(texts)
    _write_atomic(out / gamelog.log_filename(stage.id, seeds[0], "txt"), text_blob)
    _write_atomic(
        out / gamelog.log_filename(stage.id, seeds[0], "json"),
        json.dumps(gamelog.logs_to_document(logs), indent=2) + "\n",
    )
    print(text_blob, end="")
    return 0


def cmd_tournament(args) -> int:
    public_ids = _stage_list(args.public)
    private_ids = _stage_list(args.private)
    report = run_tournament(
        public_ids,
        private_ids,
        args.entrants,
        _budgets(args),
        seed=args.seed,
        timing_mode=args.timing,
        weights=_weights(args),
    )
    out = _out_dir(args)
    report_path = out / f"tournament-report-{args.seed}.json"
    _write_atomic(report_path, tournament.report_to_json(report))
    for stage_report in report.stage_reports:
        if not stage_report.logs:
            continue
        texts = [
            gamelog.to_text(log, game_number=number)
            for number, log in enumerate(stage_report.logs, start=1)
        ]
        _write_atomic(
            out / gamelog.log_filename(stage_report.stage_id, args.seed, "txt"),
            "\n".join(texts),
        )
        _write_atomic(
            out / gamelog.log_filename(stage_report.stage_id, args.seed, "json"),
            json.dumps(gamelog.logs_to_document(stage_report.logs), indent=2) + "\n",
        )

    for stage_report in report.stage_reports:
        stage = get_stage(stage_report.stage_id)
        print(f"Stage {stage.id} ({stage.name}):")
        for rank, row in enumerate(stage_report.leaderboard, start=1):
            print(
                f"  {rank}. {row.strategy_id:<16} winRate {row.win_rate:.3f}"
                f"  ({row.wins}-{row.losses}-{row.draws})"
            )
    print("Entrant scores:")
    ranked = sorted(report.weighted.items(), key=lambda kv: (-kv[1], kv[0]))
    for entrant_id, score in ranked:
        vector = report.metrics[entrant_id]
        print(
            f"  {entrant_id:<16} P {vector.P:.3f} A {vector.A:.3f} E {vector.E:.3f}"
            f" G {vector.G:.3f} R {vector.R:.3f}  score {score:.3f}"
        )
    print(f"Report written to {report_path}")
    return 0


def cmd_analyze(args) -> int:
    stage = get_stage(args.stage)
    system = _resolve_system(args.system)
    budgets = _budgets(args)
    out = _out_dir(args)

    wall_start = time.perf_counter()
    outcome, record = run_analysis_phase(
        system, stage, budgets, timing_mode=args.timing, seed=args.seed
    )
    wall = time.perf_counter() - wall_start

    transcript = {
        "systemId": system.id,
        "stageId": stage.id,
        "seed": args.seed,
        "timingMode": args.timing,
        "budget": {
            "tAnalysis": budgets.t_analysis,
            "scale": budgets.scale,
            "total": budgets.analysis_seconds,
        },
        "disqualified": record.disqualified,
        "reason": record.reason,
        "elapsed": record.elapsed,
        "wallTime": wall,
    }
    succeeded = not isinstance(outcome, DisqualifiedForStage)
    if succeeded:
        transcript["behaviors"] = outcome.behaviors.as_dict()
        transcript["captureBonus"] = outcome.capture_bonus
        transcript["openingBookSize"] = len(outcome.book)
    base = f"{system.id.replace(':', '-')}-{stage.id}-{args.seed}"
    transcript_path = out / f"analysis-{base}.json"
    _write_atomic(transcript_path, json.dumps(transcript, indent=2, sort_keys=True) + "\n")
    if succeeded:
        strategy_path = out / f"strategy-{base}.json"
        _write_atomic(
            strategy_path, json.dumps(outcome.to_document(), indent=2, sort_keys=True) + "\n"
        )
        print(f"Strategy written to {strategy_path}")
        print(f"Transcript written to {transcript_path}")
        return 0
    print(f"Transcript written to {transcript_path}")
    print(f"analysis disqualified: {record.reason}", file=sys.stderr)
    return 1


def cmd_replay(args) -> int:
    document = json.loads(pathlib.Path(args.log).read_text())
    if isinstance(document, list):
        if not 1 <= args.game <= len(document):
            raise ValueError(f"--game {args.game} outside 1..{len(document)}")
        log = gamelog.from_structured(document[args.game - 1])
    else:
        log = gamelog.from_structured(document)

    metadata = log.metadata
    total = len(log.moves)
    k = total if args.move is None else args.move
    board = gamelog.replay(log, k)

    print(
        f"Game {args.game}: {metadata.black_strategy}(B) vs "
        f"{metadata.white_strategy}(W) on {metadata.stage_name}"
    )
    if k == 0:
        print("Initial position")
    else:
        record = log.moves[k - 1]
        name = metadata.black_strategy if record.player == BLACK else metadata.white_strategy
        color = "B" if record.player == BLACK else "W"
        notation = position_to_notation(record.position, board.size)
        print(f"Move {k}/{total}: {name}({color}) {notation}")
    print(render_board(board))
    if args.verify:
        ok = gamelog.verify_log(log)
        print(f"verify: {'PASS' if ok else 'FAIL'}")
        return 0 if ok else 1
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        timing_mode=args.timing,
        t_game=args.t_game,
        scale=args.scale,
        reports_dir=args.reports_dir,
        static_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_budget_flags(parser):
    parser.add_argument("--t-analysis", type=float, default=60.0, metavar="SECONDS")
    parser.add_argument("--t-game", type=float, default=10.0, metavar="SECONDS")
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--timing", choices=TIMING_MODES, default=WALL)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, metavar="DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="othello-arena",
        description="Hidden-rule Othello benchmark arena",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stages = sub.add_parser("stages", help="list builtin stages")
    p_stages.add_argument("--json", action="store_true", help="emit stage documents")
    p_stages.set_defaults(fn=cmd_stages)

    p_play = sub.add_parser("play", help="play one or more logged games")
    p_play.add_argument("stage")
    p_play.add_argument("black", help=f"one of {', '.join(BASELINE_IDS)}, or meta-learner")
    p_play.add_argument("white")
    p_play.add_argument("--seeds", default=None, help="comma list; one game per seed")
    _add_budget_flags(p_play)
    p_play.set_defaults(fn=cmd_play)

    p_tournament = sub.add_parser("tournament", help="analysis phase + round robins")
    p_tournament.add_argument("entrants", nargs="+")
    p_tournament.add_argument("--public", default="", metavar="IDS", help="comma list")
    p_tournament.add_argument("--private", required=True, metavar="IDS", help="comma list")
    p_tournament.add_argument("--weights", default=None, metavar="wP,wA,wE,wG,wR")
    _add_budget_flags(p_tournament)
    p_tournament.set_defaults(fn=cmd_tournament)

    p_analyze = sub.add_parser("analyze", help="run one analysis phase")
    p_analyze.add_argument("system", help="meta-learner or module:callable")
    p_analyze.add_argument("stage")
    _add_budget_flags(p_analyze)
    p_analyze.set_defaults(fn=cmd_analyze)

    p_replay = sub.add_parser("replay", help="render a board from a structured log")
    p_replay.add_argument("log", help="JSON log file (array or single game)")
    p_replay.add_argument("--game", type=int, default=1, metavar="N")
    p_replay.add_argument("--move", type=int, default=None, metavar="K")
    p_replay.add_argument("--verify", action="store_true")
    p_replay.set_defaults(fn=cmd_replay)

    p_serve = sub.add_parser("serve", help="launch the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--timing", choices=TIMING_MODES, default=WALL)
    p_serve.add_argument("--t-game", type=float, default=10.0, metavar="SECONDS")
    p_serve.add_argument("--scale", type=float, default=1.0)
    p_serve.add_argument(
        "--reports-dir",
        default=None,
        metavar="DIR",
        help="directory of tournament-report-*.json files to expose as leaderboards",
    )
    p_serve.add_argument(
        "--ui",
        default=None,
        metavar="DIR",
        help="static directory (built web client) to serve at /",
    )
    p_serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, meta.AnalysisTimeout, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
