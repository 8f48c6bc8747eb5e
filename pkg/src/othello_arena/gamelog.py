"""Game logging: the human-readable text format, the structured JSON-style
document format, replay reconstruction, and verification by re-simulation.

Both formats follow the published samples byte for byte; forfeit games add
one trailing line (text) or one metadata key (structured) and are otherwise
identical.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .core import (
    BLACK,
    WHITE,
    Board,
    GameOutcome,
    MoveRecord,
    OutcomeReason,
    Position,
    RuleSet,
    count_discs,
    has_valid_move,
    opponent,
    position_to_notation,
    notation_to_position,
)
from .stages import StageConfig, get_stage

# Timestamp used in deterministic timing mode so reports are byte-identical.
DETERMINISTIC_TIMESTAMP = "1970-01-01T00:00:00.000Z"


def utc_timestamp() -> str:
    """Current UTC time in the log format (millisecond precision, Z suffix)."""
    now = datetime.datetime.now(datetime.timezone.utc)
    return now.strftime("%Y-%m-%dT%H:%M:%S.") + f"{now.microsecond // 1000:03d}Z"


@dataclass(frozen=True)
class GameLogMetadata:
    timestamp: str
    stage_id: str
    stage_name: str
    black_strategy: str
    white_strategy: str
    black_score: int
    white_score: int
    winner: int
    game_length: int
    # Set only for forfeited games: the offending player and the reason.
    forfeit_player: Optional[int] = None
    forfeit_reason: Optional[str] = None


@dataclass(frozen=True)
class GameLog:
    metadata: GameLogMetadata
    initial_board: Board
    moves: tuple
    analysis_data: Optional[dict] = None


class GameRecorder:
    """Accumulates one game's moves and finalizes an immutable GameLog."""

    def __init__(
        self,
        stage: StageConfig,
        black_name: str,
        white_name: str,
        initial_board: Board,
        timestamp: Optional[str] = None,
    ):
        self._stage = stage
        self._black = black_name
        self._white = white_name
        self._initial = initial_board
        self._timestamp = timestamp if timestamp is not None else utc_timestamp()
        self._moves: list[MoveRecord] = []

    def record(self, record: MoveRecord) -> None:
        self._moves.append(record)

    def finish(self, outcome: GameOutcome, analysis_data: Optional[dict] = None) -> GameLog:
        forfeit_player = None
        forfeit_reason = None
        if outcome.reason != OutcomeReason.Normal:
            forfeit_player = opponent(outcome.winner) if outcome.winner else None
            forfeit_reason = outcome.reason.value
        metadata = GameLogMetadata(
            timestamp=self._timestamp,
            stage_id=self._stage.id,
            stage_name=self._stage.name,
            black_strategy=self._black,
            white_strategy=self._white,
            black_score=outcome.black_score,
            white_score=outcome.white_score,
            winner=outcome.winner,
            game_length=len(self._moves),
            forfeit_player=forfeit_player,
            forfeit_reason=forfeit_reason,
        )
        return GameLog(
            metadata=metadata,
            initial_board=self._initial,
            moves=tuple(self._moves),
            analysis_data=analysis_data,
        )


# ---------------------------------------------------------------------------
# Text format


def _forfeit_line(metadata: GameLogMetadata) -> str:
    name = metadata.black_strategy if metadata.forfeit_player == BLACK else metadata.white_strategy
    if metadata.forfeit_reason == OutcomeReason.TimeForfeit.value:
        return f"{name} forfeits on time!"
    return f"{name} forfeits on an illegal move!"


def to_text(log: GameLog, game_number: int = 1) -> str:
    """Renders the human-readable transcript."""
    metadata = log.metadata
    lines = [
        f"=== Game {game_number} ===",
        f"Game started: {metadata.black_strategy}(B) vs "
        f"{metadata.white_strategy}(W) on Stage: {metadata.stage_name}",
    ]
    size = log.initial_board.size
    for record in log.moves:
        name = metadata.black_strategy if record.player == BLACK else metadata.white_strategy
        color = "B" if record.player == BLACK else "W"
        lines.append(f"{name}({color}): {position_to_notation(record.position, size)}")
    lines.append(f"Game over: Final score {metadata.black_score}-{metadata.white_score}")
    if metadata.winner == BLACK:
        lines.append("Black wins!")
    elif metadata.winner == WHITE:
        lines.append("White wins!")
    else:
        lines.append("Tie!")
    if metadata.forfeit_player is not None:
        lines.append(_forfeit_line(metadata))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ParsedTextLog:
    """Surface content of a text transcript; boards are not recoverable."""

    game_number: int
    black_strategy: str
    white_strategy: str
    stage_name: str
    moves: tuple  # of (strategy name, player, Position)
    black_score: int
    white_score: int
    winner: int
    forfeit_line: Optional[str] = None


_HEADER_RE = re.compile(r"^=== Game (\d+) ===$")
_STARTED_RE = re.compile(r"^Game started: (.+)\(B\) vs (.+)\(W\) on Stage: (.+)$")
_MOVE_RE = re.compile(r"^(.+)\((B|W)\): ([a-p]\d{1,2})$")
_SCORE_RE = re.compile(r"^Game over: Final score (\d+)-(\d+)$")
_WINNER_LINES = {"Black wins!": BLACK, "White wins!": WHITE, "Tie!": 0}
_FORFEIT_RE = re.compile(r"^(.+) forfeits on (time|an illegal move)!$")


def parse_text(text: str) -> ParsedTextLog:
    """Parses a transcript under the strict line grammar.

    Raises ValueError naming the first offending line.
    """
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty transcript")

    def fail(index, expected):
        raise ValueError(f"line {index + 1}: expected {expected}, got {lines[index]!r}")

    match = _HEADER_RE.match(lines[0])
    if not match:
        fail(0, "'=== Game N ==='")
    game_number = int(match.group(1))
    if len(lines) < 2:
        raise ValueError("line 2: missing 'Game started:' line")
    match = _STARTED_RE.match(lines[1])
    if not match:
        fail(1, "'Game started:' line")
    black, white, stage_name = match.groups()

    moves = []
    index = 2
    while index < len(lines) and not lines[index].startswith("Game over:"):
        match = _MOVE_RE.match(lines[index])
        if not match:
            fail(index, "move line or 'Game over:'")
        name, color, notation = match.groups()
        player = BLACK if color == "B" else WHITE
        expected_name = black if player == BLACK else white
        if name != expected_name:
            fail(index, f"strategy name {expected_name!r}")
        # The transcript carries no board size; bound-check at the maximum.
        moves.append((name, player, notation_to_position(notation, 16)))
        index += 1
    if index >= len(lines):
        raise ValueError(f"line {len(lines) + 1}: missing 'Game over:' line")
    match = _SCORE_RE.match(lines[index])
    if not match:
        fail(index, "'Game over: Final score B-W'")
    black_score, white_score = int(match.group(1)), int(match.group(2))
    index += 1
    if index >= len(lines) or lines[index] not in _WINNER_LINES:
        raise ValueError(f"line {index + 1}: expected winner line")
    winner = _WINNER_LINES[lines[index]]
    index += 1

    forfeit_line = None
    if index < len(lines) and lines[index]:
        if not _FORFEIT_RE.match(lines[index]):
            fail(index, "forfeit line or end of transcript")
        forfeit_line = lines[index]
        index += 1
    for rest in range(index, len(lines)):
        if lines[rest]:
            fail(rest, "end of transcript")

    return ParsedTextLog(
        game_number=game_number,
        black_strategy=black,
        white_strategy=white,
        stage_name=stage_name,
        moves=tuple(moves),
        black_score=black_score,
        white_score=white_score,
        winner=winner,
        forfeit_line=forfeit_line,
    )


# ---------------------------------------------------------------------------
# Structured format


def to_structured(log: GameLog) -> dict:
    """One game as a structured document with the published field names."""
    metadata = log.metadata
    meta_doc = {
        "timestamp": metadata.timestamp,
        "stageId": metadata.stage_id,
        "stageName": metadata.stage_name,
        "blackStrategy": metadata.black_strategy,
        "whiteStrategy": metadata.white_strategy,
        "blackScore": metadata.black_score,
        "whiteScore": metadata.white_score,
        "winner": metadata.winner,
        "gameLength": metadata.game_length,
    }
    if metadata.forfeit_player is not None:
        meta_doc["forfeit"] = {
            "player": metadata.forfeit_player,
            "reason": metadata.forfeit_reason,
        }
    doc = {
        "metadata": meta_doc,
        "initialBoard": log.initial_board.grid(),
        "moves": [
            {
                "player": record.player,
                "position": {"row": record.position.row, "col": record.position.col},
                "capturedCount": record.captured_count,
                "timeSpent": record.time_spent_ms,
                "boardAfter": record.board_after.grid(),
            }
            for record in log.moves
        ],
    }
    if log.analysis_data is not None:
        doc["analysisData"] = log.analysis_data
    return doc


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise ValueError(f"{path}.{key} is missing")
    value = doc[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ValueError(f"{path}.{key} has the wrong type")
    return value


def _parse_board(rows, path: str) -> Board:
    if not isinstance(rows, list) or not rows:
        raise ValueError(f"{path} must be a non-empty 2D array")
    size = len(rows)
    cells = bytearray()
    for r, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != size:
            raise ValueError(f"{path}[{r}] must have {size} entries")
        for c, value in enumerate(row):
            if value not in (0, 1, 2, 3) or isinstance(value, bool):
                raise ValueError(f"{path}[{r}][{c}] must be a cell value 0..3")
            cells.append(value)
    return Board(size, bytes(cells))


_METADATA_KEYS = {
    "timestamp",
    "stageId",
    "stageName",
    "blackStrategy",
    "whiteStrategy",
    "blackScore",
    "whiteScore",
    "winner",
    "gameLength",
    "forfeit",
}
_MOVE_KEYS = {"player", "position", "capturedCount", "timeSpent", "boardAfter"}
_GAME_KEYS = {"metadata", "initialBoard", "moves", "analysisData"}


def from_structured(doc: dict) -> GameLog:
    """Parses and validates one game document; errors name the field path."""
    if not isinstance(doc, dict):
        raise ValueError("game document must be an object")
    unknown = set(doc) - _GAME_KEYS
    if unknown:
        raise ValueError(f"unknown field {sorted(unknown)[0]!r}")
    meta_doc = _require(doc, "metadata", dict, "game")
    unknown = set(meta_doc) - _METADATA_KEYS
    if unknown:
        raise ValueError(f"unknown field metadata.{sorted(unknown)[0]}")

    winner = _require(meta_doc, "winner", int, "metadata")
    if winner not in (0, 1, 2):
        raise ValueError("metadata.winner must be 0, 1, or 2")
    forfeit_player = None
    forfeit_reason = None
    if "forfeit" in meta_doc:
        forfeit = meta_doc["forfeit"]
        if not isinstance(forfeit, dict) or set(forfeit) != {"player", "reason"}:
            raise ValueError("metadata.forfeit must have player and reason")
        forfeit_player = forfeit["player"]
        forfeit_reason = forfeit["reason"]
        if forfeit_player not in (1, 2):
            raise ValueError("metadata.forfeit.player must be 1 or 2")
        valid_reasons = (OutcomeReason.TimeForfeit.value, OutcomeReason.IllegalMove.value)
        if forfeit_reason not in valid_reasons:
            raise ValueError("metadata.forfeit.reason is not a forfeit reason")

    metadata = GameLogMetadata(
        timestamp=_require(meta_doc, "timestamp", str, "metadata"),
        stage_id=_require(meta_doc, "stageId", str, "metadata"),
        stage_name=_require(meta_doc, "stageName", str, "metadata"),
        black_strategy=_require(meta_doc, "blackStrategy", str, "metadata"),
        white_strategy=_require(meta_doc, "whiteStrategy", str, "metadata"),
        black_score=_require(meta_doc, "blackScore", int, "metadata"),
        white_score=_require(meta_doc, "whiteScore", int, "metadata"),
        winner=winner,
        game_length=_require(meta_doc, "gameLength", int, "metadata"),
        forfeit_player=forfeit_player,
        forfeit_reason=forfeit_reason,
    )

    initial_board = _parse_board(
        _require(doc, "initialBoard", list, "game"), "initialBoard"
    )
    moves_doc = _require(doc, "moves", list, "game")
    if metadata.game_length != len(moves_doc):
        raise ValueError("metadata.gameLength does not match the move count")
    moves = []
    for i, move_doc in enumerate(moves_doc):
        path = f"moves[{i}]"
        if not isinstance(move_doc, dict):
            raise ValueError(f"{path} must be an object")
        unknown = set(move_doc) - _MOVE_KEYS
        if unknown:
            raise ValueError(f"unknown field {path}.{sorted(unknown)[0]}")
        player = _require(move_doc, "player", int, path)
        if player not in (1, 2):
            raise ValueError(f"{path}.player must be 1 or 2")
        pos_doc = _require(move_doc, "position", dict, path)
        if set(pos_doc) != {"row", "col"}:
            raise ValueError(f"{path}.position must have row and col")
        board_after = _parse_board(
            _require(move_doc, "boardAfter", list, path), f"{path}.boardAfter"
        )
        moves.append(
            MoveRecord(
                player=player,
                position=Position(pos_doc["row"], pos_doc["col"]),
                captured_count=_require(move_doc, "capturedCount", int, path),
                board_after=board_after,
                time_spent_ms=_require(move_doc, "timeSpent", int, path),
            )
        )

    analysis_data = doc.get("analysisData")
    if analysis_data is not None and not isinstance(analysis_data, dict):
        raise ValueError("analysisData must be an object")
    return GameLog(
        metadata=metadata,
        initial_board=initial_board,
        moves=tuple(moves),
        analysis_data=analysis_data,
    )


def logs_to_document(logs) -> list:
    """Top-level document: an array of game objects, as published."""
    return [to_structured(log) for log in logs]


def logs_from_document(doc) -> list:
    if not isinstance(doc, list):
        raise ValueError("log document must be an array of games")
    return [from_structured(entry) for entry in doc]


def log_filename(stage_id: str, seed: int, fmt: str) -> str:
    if fmt not in ("txt", "json"):
        raise ValueError(f"unknown log format {fmt!r}")
    return f"game-{stage_id}-{seed}.{fmt}"


# ---------------------------------------------------------------------------
# Replay and verification


def _resolve_rules(log: GameLog, rules: Optional[RuleSet]) -> RuleSet:
    if rules is not None:
        return rules
    try:
        return get_stage(log.metadata.stage_id).rules
    except ValueError:
        raise ValueError(
            f"stage {log.metadata.stage_id!r} is not a builtin stage; pass rules explicitly"
        ) from None


def replay(log: GameLog, k: int, rules: Optional[RuleSet] = None) -> Board:
    """Board after the first k moves, rebuilt by re-simulation.

    boardAfter snapshots are deliberately not trusted. Rules default to the
    builtin catalog entry for the log's stage id.
    """
    if not 0 <= k <= len(log.moves):
        raise ValueError(f"k = {k} outside 0..{len(log.moves)}")
    rules = _resolve_rules(log, rules)
    board = log.initial_board
    for record in log.moves[:k]:
        applied = kernels.apply_move_cells(
            board.cells,
            board.size,
            record.player,
            record.position.row,
            record.position.col,
            rules.ignore_occlusion,
        )
        if applied is None:
            raise ValueError(
                f"move {position_to_notation(record.position, board.size)} by player "
                f"{record.player} is illegal during replay"
            )
        board = Board(board.size, applied[0])
    return board


def _start_player(log: GameLog) -> Optional[int]:
    try:
        return get_stage(log.metadata.stage_id).start_player
    except ValueError:
        return None


def verify_log(log: GameLog, rules: Optional[RuleSet] = None) -> bool:
    """True iff the log is internally consistent under re-simulation.

    Checks every move's legality in turn sequence, capturedCount, and
    boardAfter snapshot, then the final scores and winner (forfeits exempt
    the winner check: the non-offender wins regardless of discs).
    """
    try:
        rules = _resolve_rules(log, rules)
    except ValueError:
        return False
    board = log.initial_board
    expected = _start_player(log)
    if expected is None:
        expected = log.moves[0].player if log.moves else BLACK
    for record in log.moves:
        if expected is None:
            return False
        if record.player != expected:
            # Only a forced pass may hand the turn over out of order.
            if has_valid_move(board, expected, rules):
                return False
            if opponent(expected) != record.player:
                return False
        applied = kernels.apply_move_cells(
            board.cells,
            board.size,
            record.player,
            record.position.row,
            record.position.col,
            rules.ignore_occlusion,
        )
        if applied is None:
            return False
        cells, captured = applied
        board = Board(board.size, cells)
        if captured != record.captured_count:
            return False
        if board != record.board_after:
            return False
        expected = _next_mover(board, record.player, rules)
    counts = count_discs(board)
    metadata = log.metadata
    if (counts.black, counts.white) != (metadata.black_score, metadata.white_score):
        return False
    if metadata.forfeit_player is not None:
        return metadata.winner == opponent(metadata.forfeit_player)
    return metadata.winner == _declared_winner(counts, rules)


def _next_mover(board: Board, mover: int, rules: RuleSet) -> Optional[int]:
    from .core import determine_next_player

    return determine_next_player(board, mover, rules)


def _declared_winner(counts, rules: RuleSet) -> int:
    if counts.black == counts.white:
        return 0
    if counts.black > counts.white:
        return WHITE if rules.reverse_win else BLACK
    return BLACK if rules.reverse_win else WHITE
