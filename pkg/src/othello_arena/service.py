"""HTTP session service: live human-vs-strategy play on hidden-rule stages,
session logs, replays, and stored tournament leaderboards.

Rule opacity is a wire contract here: no response body ever carries a rule
flag. Humans infer stage rules from observed behavior, exactly like the
systems under test. All payloads use the structured-log vocabulary (cells
0..3, players 1/2, positions {row, col}).
"""

from __future__ import annotations

import dataclasses
import json
import pathlib
import random
import threading
import uuid
from typing import Optional

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import StreamingResponse

from . import core, stages
from .baselines import BASELINE_IDS, MoveContext, display_name, make_baseline
from .core import BLACK, WHITE, GameOutcome, OutcomeReason, Position, opponent
from .env import make_env
from .gamelog import DETERMINISTIC_TIMESTAMP, GameRecorder, to_structured
from .timectl import DETERMINISTIC, WALL, DecisionTimer, validate_mode

AWAITING_HUMAN = "awaitingHuman"
AWAITING_AI = "awaitingAI"
FINISHED = "finished"


class SessionState:
    """One live game; every mutation happens under the session lock."""

    def __init__(self, stage, human_color, opponent_id, timing_mode, ai_budget):
        self.id = uuid.uuid4().hex
        self.stage = stage
        self.human_color = human_color
        self.ai_color = opponent(human_color)
        self.opponent_id = opponent_id
        self.decide = make_baseline(opponent_id)
        self.env = make_env(stage, timing_mode)
        self.rng = random.Random(0)
        self.state = stages.initial_state(stage)
        self.ai_remaining = ai_budget
        self.outcome: Optional[GameOutcome] = None
        self.events: list = []
        self.lock = threading.Lock()
        names = {
            human_color: "Human",
            self.ai_color: display_name(opponent_id),
        }
        self.black_name = names[BLACK]
        self.white_name = names[WHITE]
        timestamp = DETERMINISTIC_TIMESTAMP if timing_mode == DETERMINISTIC else None
        self.recorder = GameRecorder(
            stage, self.black_name, self.white_name, self.state.board, timestamp
        )

    @property
    def status(self) -> str:
        if self.outcome is not None or self.state.terminal:
            return FINISHED
        if self.state.current_player == self.human_color:
            return AWAITING_HUMAN
        return AWAITING_AI

    def push_event(self, payload: dict) -> dict:
        event = {"seq": len(self.events) + 1, **payload}
        self.events.append(event)
        return event


def create_app(
    *,
    timing_mode: str = WALL,
    t_game: float = 10.0,
    scale: float = 1.0,
    reports: Optional[dict] = None,
    reports_dir=None,
    static_dir=None,
) -> FastAPI:
    """Builds the service; sessions and reports live in app.state.

    `static_dir` (optional) is mounted at "/" after the API routes, so the
    web client can be served from the same origin as the endpoints it calls.
    """
    validate_mode(timing_mode)
    app = FastAPI(title="othello-arena")
    app.state.sessions = {}
    app.state.timing_mode = timing_mode
    app.state.ai_budget = t_game * scale
    app.state.reports = dict(reports or {})
    if reports_dir is not None:
        for path in sorted(pathlib.Path(reports_dir).glob("tournament-report-*.json")):
            app.state.reports[path.stem] = json.loads(path.read_text())
    timer = DecisionTimer(timing_mode)

    def get_session(session_id: str) -> SessionState:
        session = app.state.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, detail=f"unknown session {session_id!r}")
        return session

    def valid_moves(session: SessionState) -> list:
        if session.status == FINISHED:
            return []
        return core.get_valid_moves(
            session.state.board, session.state.current_player, session.stage.rules
        )

    def snapshot(session: SessionState) -> dict:
        counts = core.count_discs(session.state.board)
        last = session.state.history[-1] if session.state.history else None
        moves = (
            [{"row": p.row, "col": p.col} for p in valid_moves(session)]
            if session.status == AWAITING_HUMAN
            else []
        )
        doc = {
            "sessionId": session.id,
            "stageId": session.stage.id,
            "stageName": session.stage.name,
            "boardSize": session.stage.board_size,
            "humanColor": session.human_color,
            "opponentId": session.opponent_id,
            "status": session.status,
            "board": session.state.board.grid(),
            "currentPlayer": None if session.status == FINISHED else session.state.current_player,
            "validMoves": moves,
            "scores": {"black": counts.black, "white": counts.white},
            "moveCount": len(session.state.history),
            "lastMove": None
            if last is None
            else {"player": last.player, "position": {"row": last.position.row, "col": last.position.col}},
            "eventSeq": len(session.events),
        }
        if session.outcome is not None:
            doc["outcome"] = {
                "winner": session.outcome.winner,
                "blackScore": session.outcome.black_score,
                "whiteScore": session.outcome.white_score,
                "reason": session.outcome.reason.value,
            }
        return doc

    def move_step(record, time_ms: int) -> dict:
        return {
            "player": record.player,
            "position": {"row": record.position.row, "col": record.position.col},
            "capturedCount": record.captured_count,
            "timeSpent": time_ms,
            "boardAfter": record.board_after.grid(),
        }

    def finish(session: SessionState, outcome: GameOutcome) -> None:
        session.outcome = outcome
        session.push_event(
            {
                "type": "finished",
                "winner": outcome.winner,
                "blackScore": outcome.black_score,
                "whiteScore": outcome.white_score,
                "reason": outcome.reason.value,
            }
        )

    def finish_if_over(session: SessionState) -> None:
        if session.outcome is None and session.state.terminal:
            finish(session, core.game_outcome(session.state, session.stage.rules))

    def apply_recorded(session: SessionState, pos: Position, time_ms: int) -> dict:
        session.state = core.apply_move(session.state, pos, session.stage.rules)
        record = session.state.history[-1]
        if time_ms:
            record = dataclasses.replace(record, time_spent_ms=time_ms)
        session.recorder.record(record)
        step = move_step(record, time_ms)
        session.push_event({"type": "move", **step})
        return step

    def ai_turn(session: SessionState) -> list:
        """Runs AI moves until the human's turn or the end; lock is held."""
        steps = []
        while session.status == AWAITING_AI:
            mover = session.state.current_player
            ctx = MoveContext(
                board=session.state.board,
                player=mover,
                valid_moves=valid_moves(session),
                env=session.env,
                rng=session.rng,
                remaining_game_budget=session.ai_remaining,
            )
            try:
                pos, cost = timer.measure(session.env, lambda: session.decide(ctx))
            except Exception:
                finish(
                    session,
                    core.game_outcome(
                        session.state,
                        session.stage.rules,
                        reason=OutcomeReason.IllegalMove,
                        offender=mover,
                    ),
                )
                break
            session.ai_remaining -= cost
            if session.ai_remaining < 0:
                finish(
                    session,
                    core.game_outcome(
                        session.state,
                        session.stage.rules,
                        reason=OutcomeReason.TimeForfeit,
                        offender=mover,
                    ),
                )
                break
            try:
                move = Position(*pos)
                legal = core.is_valid_move(session.state.board, mover, move, session.stage.rules)
            except Exception:
                legal = False
            if not legal:
                finish(
                    session,
                    core.game_outcome(
                        session.state,
                        session.stage.rules,
                        reason=OutcomeReason.IllegalMove,
                        offender=mover,
                    ),
                )
                break
            steps.append(apply_recorded(session, move, int(round(cost * 1000))))
            finish_if_over(session)
        return steps

    def session_log(session: SessionState) -> dict:
        """Structured log for the session as it stands; always verifiable."""
        if session.outcome is not None:
            outcome = session.outcome
        else:
            counts = core.count_discs(session.state.board)
            rules = session.stage.rules
            if counts.black == counts.white:
                winner = 0
            elif counts.black > counts.white:
                winner = WHITE if rules.reverse_win else BLACK
            else:
                winner = BLACK if rules.reverse_win else WHITE
            outcome = GameOutcome(winner, counts.black, counts.white)
        return to_structured(session.recorder.finish(outcome))

    # ------------------------------------------------------------------
    # Endpoints

    @app.get("/stages")
    def list_stages():
        catalog = sorted(stages.builtin_stages(), key=lambda stage: stage.id)
        return [
            stages.sanitized_document(stages.public_view(stage), public=stages.is_public(stage.id))
            for stage in catalog
        ]

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        stage_id = payload.get("stageId")
        human_color = payload.get("humanColor")
        opponent_id = payload.get("opponentId")
        if human_color not in (BLACK, WHITE):
            raise HTTPException(400, detail="humanColor must be 1 (black) or 2 (white)")
        try:
            stage = stages.get_stage(stage_id)
        except ValueError as exc:
            raise HTTPException(404, detail=str(exc))
        if opponent_id not in BASELINE_IDS:
            raise HTTPException(
                404, detail=f"unknown opponent {opponent_id!r} (one of {list(BASELINE_IDS)})"
            )
        session = SessionState(
            stage, human_color, opponent_id, app.state.timing_mode, app.state.ai_budget
        )
        app.state.sessions[session.id] = session
        with session.lock:
            finish_if_over(session)
            steps = ai_turn(session)
            return {"session": snapshot(session), "steps": steps}

    @app.get("/sessions/{session_id}")
    def get_session_snapshot(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return snapshot(session)

    @app.post("/sessions/{session_id}/moves")
    def post_move(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        with session.lock:
            if session.status != AWAITING_HUMAN:
                raise HTTPException(
                    409, detail=f"not awaiting a human move (status {session.status})"
                )
            position = payload.get("position")
            moves = valid_moves(session)
            move = None
            if (
                isinstance(position, dict)
                and isinstance(position.get("row"), int)
                and isinstance(position.get("col"), int)
            ):
                move = Position(position["row"], position["col"])
            if move is None or move not in moves:
                raise HTTPException(
                    400,
                    detail={
                        "error": "invalid move",
                        "validMoves": [{"row": p.row, "col": p.col} for p in moves],
                    },
                )
            steps = [apply_recorded(session, move, 0)]
            finish_if_over(session)
            steps.extend(ai_turn(session))
            return {"session": snapshot(session), "steps": steps}

    @app.get("/sessions/{session_id}/valid-moves")
    def get_valid_moves(session_id: str):
        session = get_session(session_id)
        with session.lock:
            moves = valid_moves(session) if session.status == AWAITING_HUMAN else []
            return {
                "status": session.status,
                "validMoves": [{"row": p.row, "col": p.col} for p in moves],
            }

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return session_log(session)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, after: int = 0):
        session = get_session(session_id)
        with session.lock:
            backlog = [event for event in session.events if event["seq"] > after]

        def stream():
            for event in backlog:
                data = json.dumps(event, separators=(",", ":"))
                yield f"id: {event['seq']}\ndata: {data}\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/replays")
    def list_replays():
        entries = []
        for session in app.state.sessions.values():
            with session.lock:
                if session.status != FINISHED:
                    continue
                counts = core.count_discs(session.state.board)
                entries.append(
                    {
                        "sessionId": session.id,
                        "stageId": session.stage.id,
                        "stageName": session.stage.name,
                        "blackStrategy": session.black_name,
                        "whiteStrategy": session.white_name,
                        "gameLength": len(session.state.history),
                        "scores": {"black": counts.black, "white": counts.white},
                    }
                )
        entries.sort(key=lambda entry: entry["sessionId"])
        return entries

    @app.get("/leaderboards")
    def list_leaderboards():
        return {"reports": sorted(app.state.reports)}

    @app.get("/leaderboards/{report_id}")
    def get_leaderboard(report_id: str):
        document = app.state.reports.get(report_id)
        if document is None:
            raise HTTPException(404, detail=f"unknown report {report_id!r}")
        return {
            "reportId": report_id,
            "stages": [
                {"stageId": entry["stageId"], "leaderboard": entry["leaderboard"]}
                for entry in document.get("stages", [])
            ],
            "metrics": document.get("metrics", {}),
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
