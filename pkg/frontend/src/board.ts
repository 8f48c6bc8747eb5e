/** DOM rendering for a BoardViewModel. Only cells the server marked as
 * valid targets are clickable; everything else is inert. */

import type { GridPosition } from "./types.js";
import type { ViewModel } from "./viewmodel.js";

export type CellClickHandler = (pos: GridPosition) => void;

export function renderView(
  root: HTMLElement,
  vm: ViewModel,
  onCellClick?: CellClickHandler
): void {
  root.textContent = "";
  if (vm.kind === "error") {
    const banner = document.createElement("div");
    banner.className = "banner error";
    banner.textContent = vm.message;
    root.appendChild(banner);
    return;
  }

  const banner = document.createElement("div");
  banner.className = "banner";
  banner.textContent = vm.banner;
  root.appendChild(banner);

  const scores = document.createElement("div");
  scores.className = "scores";
  scores.textContent = `Black ${vm.scores.black} : ${vm.scores.white} White`;
  root.appendChild(scores);

  const board = document.createElement("div");
  board.className = "board";
  board.style.setProperty("--size", String(vm.size));
  vm.grid.forEach((rowGlyphs, row) => {
    rowGlyphs.forEach((glyph, col) => {
      const cell = document.createElement("button");
      cell.type = "button";
      cell.className = `cell ${glyph}`;
      cell.dataset.row = String(row);
      cell.dataset.col = String(col);
      if (
        glyph === "lastMove" &&
        vm.lastMove &&
        vm.lastMove.position.row === row &&
        vm.lastMove.position.col === col
      ) {
        cell.classList.add(vm.lastMove.player === 1 ? "p1" : "p2");
      }
      if (glyph === "validTarget" && onCellClick) {
        cell.addEventListener("click", () => onCellClick({ row, col }));
      } else {
        cell.disabled = true;
      }
      board.appendChild(cell);
    });
  });
  root.appendChild(board);

  if (vm.moveList.length > 0) {
    const list = document.createElement("ol");
    list.className = "move-list";
    for (const entry of vm.moveList) {
      const item = document.createElement("li");
      item.textContent = entry;
      list.appendChild(item);
    }
    root.appendChild(list);
  }
}

const GLYPH_BY_CELL = ["empty", "black", "white", "blocked"] as const;

/** Inert board render straight from a cell matrix (replay frames and
 * animation intermediates); no click wiring, no overlays. */
export function renderStaticBoard(container: HTMLElement, board: number[][]): void {
  container.textContent = "";
  const el = document.createElement("div");
  el.className = "board";
  el.style.setProperty("--size", String(board.length));
  board.forEach((row, r) => {
    row.forEach((cell, c) => {
      const div = document.createElement("div");
      div.className = `cell ${GLYPH_BY_CELL[cell] ?? "empty"}`;
      div.dataset.row = String(r);
      div.dataset.col = String(c);
      el.appendChild(div);
    });
  });
  container.appendChild(el);
}

/** Rejection feedback: shakes the board; the caller re-renders with the
 * server's valid-move list to restore the highlights. */
export function indicateRejection(root: HTMLElement, durationMs = 300): void {
  const board = root.querySelector<HTMLElement>(".board");
  if (!board) return;
  board.classList.add("shake");
  setTimeout(() => board.classList.remove("shake"), durationMs);
}
