/** Replay stepper over a downloaded game log.
 *
 * Boards come straight from the log's recorded boardAfter snapshots; the
 * client re-simulates nothing, so replays work identically on stages whose
 * rules it has never been told.
 */

import type { LogDocument } from "./types.js";
import { toNotation } from "./viewmodel.js";

export interface ReplayView {
  step: number;
  total: number;
  board: number[][];
  caption: string;
  scores: { black: number; white: number } | null;
}

export function stepCount(log: LogDocument): number {
  return log.moves.length;
}

export function clampStep(log: LogDocument, step: number): number {
  return Math.max(0, Math.min(stepCount(log), Math.floor(step)));
}

/** Board after `step` moves; step 0 is the initial position. */
export function boardAt(log: LogDocument, step: number): number[][] {
  const k = clampStep(log, step);
  return k === 0 ? log.initialBoard : log.moves[k - 1].boardAfter;
}

export function replayView(log: LogDocument, step: number): ReplayView {
  const k = clampStep(log, step);
  const total = stepCount(log);
  if (k === 0) {
    return {
      step: 0,
      total,
      board: log.initialBoard,
      caption: "Initial position",
      scores: null,
    };
  }
  const move = log.moves[k - 1];
  const color = move.player === 1 ? "B" : "W";
  const base = `Move ${k}/${total}: ${color} ${toNotation(move.position)}`;
  if (k === total) {
    const { blackScore, whiteScore } = log.metadata;
    return {
      step: k,
      total,
      board: move.boardAfter,
      caption: `${base} (final ${blackScore}-${whiteScore})`,
      scores: { black: blackScore, white: whiteScore },
    };
  }
  return { step: k, total, board: move.boardAfter, caption: base, scores: null };
}
