/** Sequential animation planning for move-step bursts.
 *
 * A response may carry several steps (the human's own echo plus one or
 * more AI replies under the extra-turn rule). Each step becomes exactly
 * one frame, and frames are applied strictly one after another: frame k+1
 * is only scheduled once frame k has been applied.
 */

import type { MoveStep } from "./types.js";

export interface AnimationFrame {
  index: number;
  total: number;
  player: MoveStep["player"];
  position: MoveStep["position"];
  capturedCount: number;
  board: number[][];
}

export type Scheduler = (run: () => void, delayMs: number) => void;

const defaultScheduler: Scheduler = (run, delayMs) => {
  setTimeout(run, delayMs);
};

/** One frame per step, in response order. */
export function planAnimations(steps: MoveStep[]): AnimationFrame[] {
  return steps.map((step, index) => ({
    index,
    total: steps.length,
    player: step.player,
    position: step.position,
    capturedCount: step.capturedCount,
    board: step.boardAfter,
  }));
}

export class SequentialAnimator {
  private readonly apply: (frame: AnimationFrame) => void;
  private readonly delayMs: number;
  private readonly schedule: Scheduler;
  private busy = false;

  constructor(
    apply: (frame: AnimationFrame) => void,
    delayMs = 350,
    schedule: Scheduler = defaultScheduler
  ) {
    this.apply = apply;
    this.delayMs = delayMs;
    this.schedule = schedule;
  }

  get playing(): boolean {
    return this.busy;
  }

  /** Applies every frame in order; resolves after the last one. The first
   * frame lands immediately so the player's own move echoes without lag. */
  play(steps: MoveStep[]): Promise<void> {
    const frames = planAnimations(steps);
    if (frames.length === 0) return Promise.resolve();
    this.busy = true;
    return new Promise((resolve) => {
      const next = (at: number) => {
        this.apply(frames[at]);
        if (at + 1 >= frames.length) {
          this.busy = false;
          resolve();
          return;
        }
        this.schedule(() => next(at + 1), this.delayMs);
      };
      next(0);
    });
  }
}
