/** Thin typed wrapper over the arena service endpoints. The fetch
 * implementation is injectable so tests can replay recorded payloads. */

import type {
  ArenaEvent,
  GridPosition,
  LeaderboardReport,
  LogDocument,
  Player,
  ReplayEntry,
  SessionResponse,
  SessionSnapshot,
  SessionStatus,
  StageDocument,
} from "./types.js";

export type PostMoveResult =
  | { kind: "ok"; body: SessionResponse }
  | { kind: "invalid"; message: string; validMoves: GridPosition[] }
  | { kind: "conflict"; message: string };

export type FetchLike = (
  input: string,
  init?: RequestInit
) => Promise<Response>;

/** Parses a snapshot SSE body ("id: N" / "data: {...}" records) and hands
 * back the events ordered by sequence number. */
export function parseEventStream(text: string): ArenaEvent[] {
  const events: ArenaEvent[] = [];
  for (const chunk of text.split("\n\n")) {
    let data: string | null = null;
    for (const line of chunk.split("\n")) {
      if (line.startsWith("data: ")) data = line.slice("data: ".length);
    }
    if (data !== null) events.push(JSON.parse(data) as ArenaEvent);
  }
  return events.sort((a, b) => a.seq - b.seq);
}

async function errorDetail(response: Response): Promise<unknown> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    return body.detail ?? body;
  } catch {
    return response.statusText;
  }
}

export class ArenaClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new Error(`GET ${path}: ${response.status} ${await errorDetail(response)}`);
    }
    return (await response.json()) as T;
  }

  listStages(): Promise<StageDocument[]> {
    return this.getJson("/stages");
  }

  async createSession(
    stageId: string,
    humanColor: Player,
    opponentId: string
  ): Promise<SessionResponse> {
    const response = await this.fetchFn(this.baseUrl + "/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ stageId, humanColor, opponentId }),
    });
    if (response.status !== 201) {
      throw new Error(`create session: ${response.status} ${await errorDetail(response)}`);
    }
    return (await response.json()) as SessionResponse;
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.getJson(`/sessions/${sessionId}`);
  }

  validMoves(
    sessionId: string
  ): Promise<{ status: SessionStatus; validMoves: GridPosition[] }> {
    return this.getJson(`/sessions/${sessionId}/valid-moves`);
  }

  async postMove(
    sessionId: string,
    position: GridPosition
  ): Promise<PostMoveResult> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${sessionId}/moves`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ position }),
      }
    );
    if (response.status === 200) {
      return { kind: "ok", body: (await response.json()) as SessionResponse };
    }
    if (response.status === 400) {
      const detail = (await errorDetail(response)) as {
        error?: string;
        validMoves?: GridPosition[];
      };
      return {
        kind: "invalid",
        message: detail?.error ?? "invalid move",
        validMoves: detail?.validMoves ?? [],
      };
    }
    if (response.status === 409) {
      return { kind: "conflict", message: String(await errorDetail(response)) };
    }
    throw new Error(`post move: ${response.status} ${await errorDetail(response)}`);
  }

  getLog(sessionId: string): Promise<LogDocument> {
    return this.getJson(`/sessions/${sessionId}/log`);
  }

  listReplays(): Promise<ReplayEntry[]> {
    return this.getJson("/replays");
  }

  leaderboardIndex(): Promise<{ reports: string[] }> {
    return this.getJson("/leaderboards");
  }

  leaderboard(reportId: string): Promise<LeaderboardReport> {
    return this.getJson(`/leaderboards/${reportId}`);
  }

  /** Fetches the event backlog after a sequence number. The server sends a
   * snapshot stream and closes; callers resume with the last seq seen. */
  async events(sessionId: string, after = 0): Promise<ArenaEvent[]> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${sessionId}/events?after=${after}`
    );
    if (!response.ok) {
      throw new Error(`events: ${response.status}`);
    }
    return parseEventStream(await response.text());
  }
}
