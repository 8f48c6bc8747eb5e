/** Pure session-payload -> board-view transform.
 *
 * Legality is never computed here: the validTarget overlay comes verbatim
 * from the server's valid-move list, so humans stay exactly as rule-blind
 * as the intelligent systems playing through the API. Malformed payloads
 * yield an error banner state instead of throwing.
 */

import type {
  GridPosition,
  LastMove,
  Scores,
  SessionSnapshot,
  SessionStatus,
} from "./types.js";

export type Glyph =
  | "empty"
  | "black"
  | "white"
  | "blocked"
  | "validTarget"
  | "lastMove";

export interface BoardViewModel {
  kind: "board";
  size: number;
  grid: Glyph[][];
  scores: Scores;
  banner: string;
  status: SessionStatus;
  moveCount: number;
  validTargets: GridPosition[];
  lastMove: LastMove | null;
  moveList: string[];
}

export interface ErrorViewModel {
  kind: "error";
  message: string;
}

export type ViewModel = BoardViewModel | ErrorViewModel;

const GLYPH_BY_CELL: Glyph[] = ["empty", "black", "white", "blocked"];
const STATUSES: SessionStatus[] = ["awaitingHuman", "awaitingAI", "finished"];

/** Column letter + 1-based row, e.g. {row: 2, col: 3} -> "d3". Display
 * formatting only; carries no game knowledge. */
export function toNotation(pos: GridPosition): string {
  return String.fromCharCode(97 + pos.col) + String(pos.row + 1);
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function isCell(value: unknown): boolean {
  return typeof value === "number" && Number.isInteger(value) && value >= 0 && value <= 3;
}

function isBoard(value: unknown, size: number): value is number[][] {
  return (
    Array.isArray(value) &&
    value.length === size &&
    value.every(
      (row) => Array.isArray(row) && row.length === size && row.every(isCell)
    )
  );
}

function isPosition(value: unknown, size: number): value is GridPosition {
  if (!isRecord(value)) return false;
  const { row, col } = value;
  return (
    typeof row === "number" && Number.isInteger(row) && row >= 0 && row < size &&
    typeof col === "number" && Number.isInteger(col) && col >= 0 && col < size
  );
}

function validate(payload: unknown): SessionSnapshot | string {
  if (!isRecord(payload)) return "session payload is not an object";
  const size = payload.boardSize;
  if (typeof size !== "number" || !Number.isInteger(size) || size < 2) {
    return "missing or invalid boardSize";
  }
  if (!isBoard(payload.board, size)) return "malformed board";
  if (!STATUSES.includes(payload.status as SessionStatus)) {
    return `unknown status ${JSON.stringify(payload.status)}`;
  }
  if (payload.humanColor !== 1 && payload.humanColor !== 2) {
    return "humanColor must be 1 or 2";
  }
  const scores = payload.scores;
  if (
    !isRecord(scores) ||
    typeof scores.black !== "number" ||
    typeof scores.white !== "number"
  ) {
    return "malformed scores";
  }
  if (typeof payload.moveCount !== "number" || payload.moveCount < 0) {
    return "malformed moveCount";
  }
  const moves = payload.validMoves ?? [];
  if (!Array.isArray(moves) || !moves.every((m) => isPosition(m, size))) {
    return "malformed validMoves";
  }
  const last = payload.lastMove;
  if (last !== null && last !== undefined) {
    if (!isRecord(last) || !isPosition(last.position, size)) {
      return "malformed lastMove";
    }
  }
  return payload as unknown as SessionSnapshot;
}

function banner(snapshot: SessionSnapshot): string {
  if (snapshot.status === "finished" && snapshot.outcome) {
    const { winner, blackScore, whiteScore, reason } = snapshot.outcome;
    const head =
      winner === 0 ? "Tie" : winner === 1 ? "Black wins" : "White wins";
    const tail = reason === "normal" ? "" : ` (${reason})`;
    return `${head} ${blackScore}-${whiteScore}${tail}`;
  }
  if (snapshot.status === "finished") {
    return `Game over ${snapshot.scores.black}-${snapshot.scores.white}`;
  }
  const mover = snapshot.currentPlayer === 1 ? "Black" : "White";
  const who = snapshot.currentPlayer === snapshot.humanColor ? "you" : "AI";
  return `${mover} to move (${who})`;
}

export function viewFromState(
  payload: unknown,
  moveList: string[] = []
): ViewModel {
  const snapshot = validate(payload);
  if (typeof snapshot === "string") {
    return { kind: "error", message: snapshot };
  }

  const size = snapshot.boardSize;
  const grid: Glyph[][] = snapshot.board.map((row) =>
    row.map((cell) => GLYPH_BY_CELL[cell])
  );
  // Legal targets come from the server list, and only on the human's turn.
  const targets =
    snapshot.status === "awaitingHuman" ? snapshot.validMoves ?? [] : [];
  for (const pos of targets) {
    grid[pos.row][pos.col] = "validTarget";
  }
  if (snapshot.lastMove && snapshot.moveCount >= 1) {
    const { row, col } = snapshot.lastMove.position;
    grid[row][col] = "lastMove";
  }

  return {
    kind: "board",
    size,
    grid,
    scores: { black: snapshot.scores.black, white: snapshot.scores.white },
    banner: banner(snapshot),
    status: snapshot.status,
    moveCount: snapshot.moveCount,
    validTargets: targets.map((pos) => ({ row: pos.row, col: pos.col })),
    lastMove: snapshot.moveCount >= 1 ? snapshot.lastMove ?? null : null,
    moveList: [...moveList],
  };
}
