"""Records live service responses into tests/fixtures/.

Every byte in the fixtures crossed the HTTP boundary of the arena service;
the frontend tests consume only these recordings, so they exercise the same
wire contract a browser would. Re-run from the repository root after any
service change:

    python3 frontend/scripts/record_fixtures.py
"""

import json
import pathlib

from fastapi.testclient import TestClient

from othello_arena import tournament
from othello_arena.service import create_app

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def write(name, payload):
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)}")


def record_burst_session(client):
    """Scripted private-stage session: human Black vs positional, always the
    first listed valid move. The extra-turn rule hands the AI several
    consecutive replies, so some responses carry multi-step bursts."""
    create = client.post(
        "/sessions",
        json={"stageId": "stage-fewer-pieces", "humanColor": 1, "opponentId": "positional"},
    )
    assert create.status_code == 201
    session_id = create.json()["session"]["sessionId"]
    recording = {
        "create": create.json(),
        "firstValidMoves": client.get(f"/sessions/{session_id}/valid-moves").json(),
        "moves": [],
    }
    while True:
        snapshot = client.get(f"/sessions/{session_id}").json()
        if snapshot["status"] != "awaitingHuman":
            break
        response = client.post(
            f"/sessions/{session_id}/moves",
            json={"position": snapshot["validMoves"][0]},
        )
        assert response.status_code == 200
        recording["moves"].append(response.json())
        if response.json()["session"]["status"] == "finished":
            break
    recording["finalSnapshot"] = client.get(f"/sessions/{session_id}").json()
    recording["log"] = client.get(f"/sessions/{session_id}/log").json()
    recording["eventsText"] = client.get(f"/sessions/{session_id}/events?after=0").text
    recording["replays"] = client.get("/replays").json()
    bursts = [
        sum(1 for step in body["steps"] if step["player"] == 2)
        for body in recording["moves"]
    ]
    assert max(bursts) >= 2, f"no AI burst recorded: {bursts}"
    write("burst-session.json", recording)


def record_blocked_snapshot(client):
    """Opening snapshot on a stage with blocked cells, for glyph tests."""
    create = client.post(
        "/sessions",
        json={"stageId": "stage-c-squares", "humanColor": 1, "opponentId": "greedy"},
    )
    assert create.status_code == 201
    session_id = create.json()["session"]["sessionId"]
    rejected = client.post(
        f"/sessions/{session_id}/moves", json={"position": {"row": 0, "col": 0}}
    )
    assert rejected.status_code == 400
    write(
        "csquares-session.json",
        {
            "create": create.json(),
            "rejectedMove": rejected.json(),
            "snapshot": client.get(f"/sessions/{session_id}").json(),
        },
    )


def record_leaderboard():
    report = tournament.run_tournament(
        ["stage-0"],
        ["stage-reverse"],
        ["greedy", "positional", "smart-lv1"],
        tournament.Budgets(t_analysis=0.5, t_game=0.5),
        seed=9,
        timing_mode="deterministic",
    )
    document = json.loads(tournament.report_to_json(report))
    app = create_app(
        timing_mode="deterministic", reports={"tournament-report-9": document}
    )
    client = TestClient(app)
    write(
        "leaderboard.json",
        {
            "index": client.get("/leaderboards").json(),
            "report": client.get("/leaderboards/tournament-report-9").json(),
        },
    )


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    app = create_app(timing_mode="deterministic", t_game=5.0)
    client = TestClient(app)
    write("stages.json", client.get("/stages").json())
    record_burst_session(client)
    record_blocked_snapshot(client)
    record_leaderboard()


if __name__ == "__main__":
    main()
