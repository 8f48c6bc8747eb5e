/** Leaderboard presentation: per-stage ranked tables out of a tournament
 * report document, with a stage selector. */

import type { LeaderboardReport, LeaderboardRow } from "./types.js";

export interface LeaderboardEmpty {
  kind: "empty";
  message: string;
}

export interface LeaderboardTable {
  kind: "table";
  reportId: string;
  stageIds: string[];
  selectedStage: string;
  rows: LeaderboardRow[];
  metrics: LeaderboardReport["metrics"];
}

export type LeaderboardView = LeaderboardEmpty | LeaderboardTable;

export function leaderboardView(
  report: LeaderboardReport | null | undefined,
  stageId?: string
): LeaderboardView {
  if (!report || report.stages.length === 0) {
    return { kind: "empty", message: "no report available" };
  }
  const stageIds = report.stages.map((stage) => stage.stageId);
  const selectedStage = stageIds.includes(stageId ?? "")
    ? (stageId as string)
    : stageIds[0];
  const stage = report.stages.find((s) => s.stageId === selectedStage)!;
  const rows = [...stage.leaderboard].sort((a, b) => b.winRate - a.winRate);
  return {
    kind: "table",
    reportId: report.reportId,
    stageIds,
    selectedStage,
    rows,
    metrics: report.metrics,
  };
}
