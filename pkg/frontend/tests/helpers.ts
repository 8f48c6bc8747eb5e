import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type {
  GridPosition,
  LeaderboardReport,
  LogDocument,
  SessionResponse,
  SessionSnapshot,
  StageDocument,
} from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixtureText(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf8");
}

export function fixture<T>(name: string): T {
  return JSON.parse(fixtureText(name)) as T;
}

/** Recording of the scripted extra-turn-stage session (human Black vs the
 * positional baseline, always the first listed valid move). */
export interface BurstRecording {
  create: SessionResponse;
  firstValidMoves: { status: string; validMoves: GridPosition[] };
  moves: SessionResponse[];
  finalSnapshot: SessionSnapshot;
  log: LogDocument;
  eventsText: string;
  replays: unknown[];
}

export interface CsquaresRecording {
  create: SessionResponse;
  rejectedMove: { detail: { error: string; validMoves: GridPosition[] } };
  snapshot: SessionSnapshot;
}

export interface LeaderboardRecording {
  index: { reports: string[] };
  report: LeaderboardReport;
}

export const burstRecording = (): BurstRecording => fixture("burst-session.json");
export const csquaresRecording = (): CsquaresRecording => fixture("csquares-session.json");
export const leaderboardRecording = (): LeaderboardRecording => fixture("leaderboard.json");
export const stageDocuments = (): StageDocument[] => fixture("stages.json");

export function sortedPositions(list: GridPosition[]): GridPosition[] {
  return [...list].sort((a, b) => a.row - b.row || a.col - b.col);
}
