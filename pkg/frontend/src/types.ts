/** Wire types for the arena service. Everything here mirrors response
 * bodies exactly; the client never sees (and never reconstructs) stage
 * rule flags, only what the server chooses to send. */

export type Player = 1 | 2;
export type Winner = 0 | 1 | 2;

/** Board cell encoding shared with the service: empty/black/white/blocked. */
export type CellValue = 0 | 1 | 2 | 3;

export interface GridPosition {
  row: number;
  col: number;
}

export interface Scores {
  black: number;
  white: number;
}

export interface StageDocument {
  id: string;
  name: string;
  boardSize: number;
  initialBoard: number[][];
  startPlayer: Player;
  public: boolean;
}

export type SessionStatus = "awaitingHuman" | "awaitingAI" | "finished";

export interface Outcome {
  winner: Winner;
  blackScore: number;
  whiteScore: number;
  reason: string;
}

/** One applied move in structured-log vocabulary; boardAfter is the full
 * post-move board, which is all the client ever needs to render. */
export interface MoveStep {
  player: Player;
  position: GridPosition;
  capturedCount: number;
  timeSpent: number;
  boardAfter: number[][];
}

export interface LastMove {
  player: Player;
  position: GridPosition;
}

export interface SessionSnapshot {
  sessionId: string;
  stageId: string;
  stageName: string;
  boardSize: number;
  humanColor: Player;
  opponentId: string;
  status: SessionStatus;
  board: number[][];
  currentPlayer: Player | null;
  validMoves: GridPosition[];
  scores: Scores;
  moveCount: number;
  lastMove: LastMove | null;
  eventSeq: number;
  outcome?: Outcome;
}

export interface SessionResponse {
  session: SessionSnapshot;
  steps: MoveStep[];
}

export interface LogMetadata {
  timestamp: string;
  stageId: string;
  stageName: string;
  blackStrategy: string;
  whiteStrategy: string;
  blackScore: number;
  whiteScore: number;
  winner: Winner;
  gameLength: number;
  forfeit?: { player: Player; reason: string };
}

export interface LogDocument {
  metadata: LogMetadata;
  initialBoard: number[][];
  moves: MoveStep[];
  analysisData?: unknown;
}

export interface ReplayEntry {
  sessionId: string;
  stageId: string;
  stageName: string;
  blackStrategy: string;
  whiteStrategy: string;
  gameLength: number;
  scores: Scores;
}

export interface LeaderboardRow {
  strategyId: string;
  winRate: number;
  wins: number;
  losses: number;
  draws: number;
  games: number;
}

export interface MetricSet {
  P: number;
  A: number;
  E: number;
  G: number;
  R: number;
  weightedScore: number;
}

export interface LeaderboardReport {
  reportId: string;
  stages: { stageId: string; leaderboard: LeaderboardRow[] }[];
  metrics: Record<string, MetricSet>;
}

export interface ArenaEvent {
  seq: number;
  type: "move" | "finished";
  [key: string]: unknown;
}
