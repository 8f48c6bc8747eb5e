"""Stage catalog: built-in variants, the custom stage file format, and the
sanitized view handed to intelligent systems.

A stage is a complete variant definition: board geometry, blocked cells,
rule flags, initial placement. Sanitized views strip the rule flags; rules
must be inferred from environment behavior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .core import (
    BLACK,
    BLOCKED,
    EMPTY,
    WHITE,
    Board,
    GameState,
    Position,
    RuleSet,
)


@dataclass(frozen=True)
class StageConfig:
    id: str
    name: str
    board_size: int
    initial_pieces: tuple[tuple[Position, int], ...]
    blocked_cells: tuple[Position, ...] = ()
    rules: RuleSet = RuleSet()
    start_player: int = BLACK


@dataclass(frozen=True)
class SanitizedStageConfig:
    """Rule-blind stage view: geometry and placement only, never a RuleSet."""

    id: str
    name: str
    board_size: int
    initial_board: Board
    start_player: int


def standard_initial_pieces(size: int) -> tuple[tuple[Position, int], ...]:
    """Center four discs by the size/2 rule (white on the main diagonal)."""
    h = size // 2
    return (
        (Position(h - 1, h - 1), WHITE),
        (Position(h - 1, h), BLACK),
        (Position(h, h - 1), BLACK),
        (Position(h, h), WHITE),
    )


_C_SQUARES_CW = (Position(0, 1), Position(1, 7), Position(7, 6), Position(6, 0))


def builtin_stages() -> list[StageConfig]:
    """The built-in stage set; the first three are public, the rest private."""
    return [
        StageConfig(
            id="stage-0",
            name="Standard 8x8",
            board_size=8,
            initial_pieces=standard_initial_pieces(8),
        ),
        StageConfig(
            id="stage-6x6",
            name="Small 6x6",
            board_size=6,
            initial_pieces=standard_initial_pieces(6),
        ),
        StageConfig(
            id="stage-c-squares",
            name="8x8 (Partial C-Squares-cw)",
            board_size=8,
            initial_pieces=standard_initial_pieces(8),
            blocked_cells=_C_SQUARES_CW,
        ),
        StageConfig(
            id="stage-occlusion",
            name="8x8 (C-Squares Occlusion Agnostic)",
            board_size=8,
            initial_pieces=standard_initial_pieces(8),
            blocked_cells=_C_SQUARES_CW,
            rules=RuleSet(ignore_occlusion=True),
        ),
        StageConfig(
            id="stage-fewer-pieces",
            name="8x8 (Fewer Pieces Continue)",
            board_size=8,
            initial_pieces=standard_initial_pieces(8),
            rules=RuleSet(fewer_pieces_continue=True),
        ),
        StageConfig(
            id="stage-reverse",
            name="8x8 (Reverse Othello)",
            board_size=8,
            initial_pieces=standard_initial_pieces(8),
            rules=RuleSet(reverse_win=True),
        ),
        StageConfig(
            id="stage-offset",
            name="8x8 (Offset Start)",
            board_size=8,
            initial_pieces=(
                (Position(2, 2), WHITE),
                (Position(2, 3), BLACK),
                (Position(3, 2), BLACK),
                (Position(3, 3), WHITE),
            ),
        ),
    ]


PUBLIC_STAGE_IDS = ("stage-0", "stage-6x6", "stage-c-squares")


def is_public(stage_id: str) -> bool:
    return stage_id in PUBLIC_STAGE_IDS


def get_stage(stage_id: str) -> StageConfig:
    for stage in builtin_stages():
        if stage.id == stage_id:
            return stage
    raise ValueError(f"unknown stage id {stage_id!r}")


def validate_stage(stage: StageConfig) -> None:
    """Raises ValueError naming the first violated invariant."""
    if not 4 <= stage.board_size <= 16:
        raise ValueError(f"boardSize {stage.board_size} outside 4..16")
    if stage.start_player not in (BLACK, WHITE):
        raise ValueError(f"startPlayer must be 1 or 2, got {stage.start_player}")
    seen: dict[Position, str] = {}
    for pos, cell in stage.initial_pieces:
        if cell not in (BLACK, WHITE):
            raise ValueError(f"initialPieces cell at {tuple(pos)} must be 1 or 2, got {cell}")
        if not (0 <= pos.row < stage.board_size and 0 <= pos.col < stage.board_size):
            raise ValueError(f"initialPieces position {tuple(pos)} out of bounds")
        if pos in seen:
            raise ValueError(f"position {tuple(pos)} occurs twice")
        seen[pos] = "piece"
    for pos in stage.blocked_cells:
        if not (0 <= pos.row < stage.board_size and 0 <= pos.col < stage.board_size):
            raise ValueError(f"blockedCells position {tuple(pos)} out of bounds")
        if pos in seen:
            raise ValueError(f"position {tuple(pos)} is both a piece and blocked")
        seen[pos] = "blocked"


def initial_board(stage: StageConfig) -> Board:
    cells = bytearray(stage.board_size * stage.board_size)
    for pos in stage.blocked_cells:
        cells[pos.row * stage.board_size + pos.col] = BLOCKED
    for pos, cell in stage.initial_pieces:
        cells[pos.row * stage.board_size + pos.col] = cell
    return Board(stage.board_size, bytes(cells))


def initial_state(stage: StageConfig) -> GameState:
    """Fresh game state: populated board, start player to move, zero timers."""
    return GameState(board=initial_board(stage), current_player=stage.start_player)


def public_view(stage: StageConfig) -> SanitizedStageConfig:
    """Strips the rule flags; board and metadata are preserved."""
    return SanitizedStageConfig(
        id=stage.id,
        name=stage.name,
        board_size=stage.board_size,
        initial_board=initial_board(stage),
        start_player=stage.start_player,
    )


def serialize_stage(stage: StageConfig) -> dict:
    """Stage document: StageConfig field names, {row,col} positions, 0..3 cells."""
    return {
        "id": stage.id,
        "name": stage.name,
        "boardSize": stage.board_size,
        "initialPieces": [
            {"position": {"row": pos.row, "col": pos.col}, "cell": cell}
            for pos, cell in stage.initial_pieces
        ],
        "blockedCells": [{"row": pos.row, "col": pos.col} for pos in stage.blocked_cells],
        "rules": {
            "ignoreOcclusion": stage.rules.ignore_occlusion,
            "fewerPiecesContinue": stage.rules.fewer_pieces_continue,
            "reverseWin": stage.rules.reverse_win,
        },
        "startPlayer": stage.start_player,
    }


def sanitized_document(view: SanitizedStageConfig, public: bool | None = None) -> dict:
    doc = {
        "id": view.id,
        "name": view.name,
        "boardSize": view.board_size,
        "initialBoard": view.initial_board.grid(),
        "startPlayer": view.start_player,
    }
    if public is not None:
        doc["public"] = public
    return doc


def _require_position(value, path: str) -> Position:
    if not isinstance(value, dict) or set(value) != {"row", "col"}:
        raise ValueError(f"{path} must be an object with row and col")
    row, col = value["row"], value["col"]
    if not isinstance(row, int) or not isinstance(col, int) or isinstance(row, bool) or isinstance(col, bool):
        raise ValueError(f"{path} row/col must be integers")
    return Position(row, col)


_STAGE_FIELDS = {"id", "name", "boardSize", "initialPieces", "blockedCells", "rules", "startPlayer"}
_RULE_FIELDS = {"ignoreOcclusion", "fewerPiecesContinue", "reverseWin"}


def load_stage(document: Union[str, dict]) -> StageConfig:
    """Parses and validates a stage document.

    initialPieces defaults to the standard center placement, blockedCells to
    none, rules to all-false, startPlayer to Black. Unknown fields, overlaps,
    and out-of-bounds positions raise a ValueError naming the issue.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValueError(f"stage document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ValueError("stage document must be an object")
    unknown = set(document) - _STAGE_FIELDS
    if unknown:
        raise ValueError(f"unknown stage field {sorted(unknown)[0]!r}")
    for field_name in ("id", "name"):
        if not isinstance(document.get(field_name), str):
            raise ValueError(f"{field_name} must be a string")
    size = document.get("boardSize")
    if not isinstance(size, int) or isinstance(size, bool):
        raise ValueError("boardSize must be an integer")

    if "initialPieces" in document:
        raw_pieces = document["initialPieces"]
        if not isinstance(raw_pieces, list):
            raise ValueError("initialPieces must be a list")
        pieces = []
        for i, entry in enumerate(raw_pieces):
            if not isinstance(entry, dict) or set(entry) != {"position", "cell"}:
                raise ValueError(f"initialPieces[{i}] must have position and cell")
            pieces.append((_require_position(entry["position"], f"initialPieces[{i}].position"), entry["cell"]))
        pieces = tuple(pieces)
    else:
        pieces = standard_initial_pieces(size)

    blocked = []
    for i, entry in enumerate(document.get("blockedCells", [])):
        blocked.append(_require_position(entry, f"blockedCells[{i}]"))

    rules_doc = document.get("rules", {})
    if not isinstance(rules_doc, dict):
        raise ValueError("rules must be an object")
    unknown = set(rules_doc) - _RULE_FIELDS
    if unknown:
        raise ValueError(f"unknown rules field {sorted(unknown)[0]!r}")
    for key, value in rules_doc.items():
        if not isinstance(value, bool):
            raise ValueError(f"rules.{key} must be a boolean")
    rules = RuleSet(
        ignore_occlusion=rules_doc.get("ignoreOcclusion", False),
        fewer_pieces_continue=rules_doc.get("fewerPiecesContinue", False),
        reverse_win=rules_doc.get("reverseWin", False),
    )

    stage = StageConfig(
        id=document["id"],
        name=document["name"],
        board_size=size,
        initial_pieces=pieces,
        blocked_cells=tuple(blocked),
        rules=rules,
        start_player=document.get("startPlayer", BLACK),
    )
    validate_stage(stage)
    return stage
