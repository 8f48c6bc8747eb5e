/** Single-page wiring: play, replay browser, and leaderboards, one session
 * per tab. All game knowledge (legal moves, boards, outcomes) arrives from
 * the service; this file only routes payloads into the pure view helpers. */

import { ArenaClient } from "./api.js";
import { SequentialAnimator } from "./animate.js";
import { indicateRejection, renderStaticBoard, renderView } from "./board.js";
import { leaderboardView } from "./leaderboard.js";
import { replayView, stepCount } from "./replay.js";
import { toNotation, viewFromState } from "./viewmodel.js";
import type {
  GridPosition,
  LogDocument,
  SessionSnapshot,
  StageDocument,
} from "./types.js";

// The service accepts exactly these opponents for live sessions.
const OPPONENTS = [
  "random",
  "greedy",
  "corners",
  "positional",
  "smart-lv1",
  "smart-lv2",
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ArenaApp {
  private readonly client: ArenaClient;
  private readonly panels: Record<string, HTMLElement>;
  private readonly boardHost: HTMLElement;
  private readonly controls: HTMLElement;
  private readonly animator: SequentialAnimator;

  private snapshot: SessionSnapshot | null = null;
  private moveList: string[] = [];
  private eventSeq = 0;

  constructor(root: HTMLElement, client: ArenaClient = new ArenaClient()) {
    this.client = client;
    const nav = el("nav", "tabs");
    root.appendChild(nav);
    this.panels = {
      play: el("section", "panel play"),
      replays: el("section", "panel replays"),
      leaderboards: el("section", "panel leaderboards"),
    };
    for (const [name, panel] of Object.entries(this.panels)) {
      const button = el("button", "tab", name);
      button.addEventListener("click", () => this.show(name));
      nav.appendChild(button);
      panel.hidden = true;
      root.appendChild(panel);
    }
    this.controls = el("div", "controls");
    this.boardHost = el("div", "board-host");
    this.panels.play.append(this.controls, this.boardHost);
    this.animator = new SequentialAnimator((frame) => {
      renderStaticBoard(this.boardHost, frame.board);
    });
    this.show("play");
    void this.renderSetup();
  }

  private show(name: string): void {
    for (const [key, panel] of Object.entries(this.panels)) {
      panel.hidden = key !== name;
    }
    if (name === "replays") void this.renderReplays();
    if (name === "leaderboards") void this.renderLeaderboards();
  }

  private banner(target: HTMLElement, message: string): void {
    target.textContent = "";
    target.appendChild(el("div", "banner error", message));
  }

  private async renderSetup(): Promise<void> {
    let stages: StageDocument[];
    try {
      stages = await this.client.listStages();
    } catch (error) {
      this.banner(this.controls, `stage list unavailable: ${String(error)}`);
      return;
    }
    this.controls.textContent = "";

    const stageSelect = el("select", "stage-select");
    for (const stage of stages) {
      const option = el("option", undefined, stage.public ? stage.name : `${stage.name} *`);
      option.value = stage.id;
      stageSelect.appendChild(option);
    }
    const colorSelect = el("select", "color-select");
    for (const [value, label] of [["1", "Black"], ["2", "White"]]) {
      const option = el("option", undefined, label);
      option.value = value;
      colorSelect.appendChild(option);
    }
    const opponentSelect = el("select", "opponent-select");
    for (const id of OPPONENTS) {
      const option = el("option", undefined, id);
      option.value = id;
      opponentSelect.appendChild(option);
    }
    const start = el("button", "start", "Start game");
    start.addEventListener("click", () => {
      void this.startSession(
        stageSelect.value,
        Number(colorSelect.value) === 2 ? 2 : 1,
        opponentSelect.value
      );
    });
    this.controls.append(stageSelect, colorSelect, opponentSelect, start);
  }

  private async startSession(
    stageId: string,
    humanColor: 1 | 2,
    opponentId: string
  ): Promise<void> {
    try {
      const body = await this.client.createSession(stageId, humanColor, opponentId);
      this.snapshot = body.session;
      this.eventSeq = 0;
      this.moveList = [];
      await this.syncEvents();
      this.renderSession();
    } catch (error) {
      this.banner(this.boardHost, String(error));
    }
  }

  private renderSession(): void {
    if (!this.snapshot) return;
    renderView(
      this.boardHost,
      viewFromState(this.snapshot, this.moveList),
      (pos) => void this.submitMove(pos)
    );
    if (this.snapshot.status === "finished") {
      const download = el("button", "download", "Download log");
      download.addEventListener("click", () => void this.downloadLog());
      this.boardHost.appendChild(download);
    }
  }

  private async submitMove(pos: GridPosition): Promise<void> {
    if (!this.snapshot || this.animator.playing) return;
    const sessionId = this.snapshot.sessionId;
    const result = await this.client.postMove(sessionId, pos);
    if (result.kind === "invalid") {
      // Server rejected it: shake, then re-highlight from its list.
      indicateRejection(this.boardHost);
      this.renderSession();
      return;
    }
    if (result.kind === "conflict") {
      this.banner(this.boardHost, result.message);
      return;
    }
    // Consecutive AI replies animate one after another before the final
    // interactive state comes back.
    await this.animator.play(result.body.steps);
    this.snapshot = result.body.session;
    await this.syncEvents();
    this.renderSession();
  }

  /** The move list is driven purely off the event stream, applied in
   * sequence-number order; steps in responses only feed the animations. */
  private async syncEvents(): Promise<void> {
    if (!this.snapshot) return;
    if (this.snapshot.eventSeq <= this.eventSeq) return;
    const missed = await this.client.events(this.snapshot.sessionId, this.eventSeq);
    for (const event of missed) {
      if (event.seq <= this.eventSeq) continue;
      this.eventSeq = event.seq;
      if (event.type === "move") {
        const player = event.player === 1 ? "B" : "W";
        this.moveList.push(
          `${player} ${toNotation(event.position as GridPosition)}`
        );
      }
    }
  }

  private async downloadLog(): Promise<void> {
    if (!this.snapshot) return;
    const log = await this.client.getLog(this.snapshot.sessionId);
    const blob = new Blob([JSON.stringify(log, null, 2)], {
      type: "application/json",
    });
    const anchor = el("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = `session-${this.snapshot.sessionId}.json`;
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  }

  private async renderReplays(): Promise<void> {
    const panel = this.panels.replays;
    try {
      const entries = await this.client.listReplays();
      panel.textContent = "";
      if (entries.length === 0) {
        panel.appendChild(el("div", "banner", "no finished sessions yet"));
        return;
      }
      const list = el("ul", "replay-list");
      for (const entry of entries) {
        const item = el("li");
        const open = el(
          "button",
          "replay-open",
          `${entry.blackStrategy} vs ${entry.whiteStrategy} on ${entry.stageName} ` +
            `(${entry.scores.black}-${entry.scores.white})`
        );
        open.addEventListener("click", () => void this.openReplay(entry.sessionId));
        item.appendChild(open);
        list.appendChild(item);
      }
      panel.appendChild(list);
    } catch (error) {
      this.banner(panel, `replays unavailable: ${String(error)}`);
    }
  }

  private async openReplay(sessionId: string): Promise<void> {
    const panel = this.panels.replays;
    let log: LogDocument;
    try {
      log = await this.client.getLog(sessionId);
    } catch (error) {
      this.banner(panel, `replay unavailable: ${String(error)}`);
      return;
    }
    panel.textContent = "";
    const caption = el("div", "caption");
    const host = el("div", "board-host");
    const slider = el("input", "stepper");
    slider.type = "range";
    slider.min = "0";
    slider.max = String(stepCount(log));
    slider.value = "0";
    const back = el("button", undefined, "<");
    const forward = el("button", undefined, ">");
    const draw = (step: number) => {
      const view = replayView(log, step);
      slider.value = String(view.step);
      caption.textContent = view.caption;
      renderStaticBoard(host, view.board);
    };
    slider.addEventListener("input", () => draw(Number(slider.value)));
    back.addEventListener("click", () => draw(Number(slider.value) - 1));
    forward.addEventListener("click", () => draw(Number(slider.value) + 1));
    panel.append(caption, host, el("div", "stepper-row"), slider, back, forward);
    draw(0);
  }

  private async renderLeaderboards(reportId?: string): Promise<void> {
    const panel = this.panels.leaderboards;
    try {
      const { reports } = await this.client.leaderboardIndex();
      if (reports.length === 0) {
        this.banner(panel, "no tournament reports registered");
        return;
      }
      const selected = reports.includes(reportId ?? "") ? reportId! : reports[0];
      const report = await this.client.leaderboard(selected);
      panel.textContent = "";

      const reportSelect = el("select", "report-select");
      for (const id of reports) {
        const option = el("option", undefined, id);
        option.value = id;
        option.selected = id === selected;
        reportSelect.appendChild(option);
      }
      reportSelect.addEventListener("change", () =>
        void this.renderLeaderboards(reportSelect.value)
      );
      panel.appendChild(reportSelect);
      this.renderLeaderboardTable(panel, report, undefined);
    } catch (error) {
      this.banner(panel, `leaderboards unavailable: ${String(error)}`);
    }
  }

  private renderLeaderboardTable(
    panel: HTMLElement,
    report: Awaited<ReturnType<ArenaClient["leaderboard"]>>,
    stageId: string | undefined
  ): void {
    panel.querySelector(".leaderboard")?.remove();
    const container = el("div", "leaderboard");
    const view = leaderboardView(report, stageId);
    if (view.kind === "empty") {
      container.appendChild(el("div", "banner", view.message));
      panel.appendChild(container);
      return;
    }
    const stageSelect = el("select", "stage-select");
    for (const id of view.stageIds) {
      const option = el("option", undefined, id);
      option.value = id;
      option.selected = id === view.selectedStage;
      stageSelect.appendChild(option);
    }
    stageSelect.addEventListener("change", () =>
      this.renderLeaderboardTable(panel, report, stageSelect.value)
    );
    container.appendChild(stageSelect);

    const table = el("table", "rows");
    const head = el("tr");
    for (const title of ["strategy", "games", "wins", "losses", "draws", "win rate"]) {
      head.appendChild(el("th", undefined, title));
    }
    table.appendChild(head);
    for (const row of view.rows) {
      const tr = el("tr");
      tr.appendChild(el("td", undefined, row.strategyId));
      tr.appendChild(el("td", undefined, String(row.games)));
      tr.appendChild(el("td", undefined, String(row.wins)));
      tr.appendChild(el("td", undefined, String(row.losses)));
      tr.appendChild(el("td", undefined, String(row.draws)));
      tr.appendChild(el("td", undefined, row.winRate.toFixed(3)));
      table.appendChild(tr);
    }
    container.appendChild(table);
    panel.appendChild(container);
  }
}

export function mount(root: HTMLElement, client?: ArenaClient): ArenaApp {
  return new ArenaApp(root, client);
}

const rootEl = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootEl) {
  mount(rootEl);
}
