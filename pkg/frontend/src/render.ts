// DOM rendering of a BoardView. Cells follow the taxonomy colors via CSS
// classes: cops blue, robbers red, open white, walls black, zones green.

import type { Cell } from "./api.js";
import type { BoardView } from "./model.js";

export function renderBoard(
  root: HTMLElement,
  view: BoardView,
  onCell: ((cell: Cell) => void) | null,
): void {
  root.innerHTML = "";
  root.style.gridTemplateColumns = `repeat(${view.width}, var(--cell))`;
  for (let y = 0; y < view.height; y++) {
    for (let x = 0; x < view.width; x++) {
      const cv = view.cells[y]![x]!;
      const el = document.createElement("div");
      el.className = `cell ${cv.kind}`;
      if (cv.knownWall) el.classList.add("known-wall");
      if (cv.highlight) el.classList.add("highlight");
      if (cv.selected) el.classList.add("selected");
      if (cv.zone > 0) {
        const tag = document.createElement("span");
        tag.className = "zone-tag";
        tag.textContent = String(cv.zone);
        el.appendChild(tag);
      }
      if (cv.beliefHits > 0) {
        const mark = document.createElement("span");
        mark.className = "belief-mark";
        mark.textContent = "?";
        mark.title = `${cv.beliefHits} possible placement(s)`;
        el.appendChild(mark);
      }
      for (const i of cv.cops) el.appendChild(piece("cop", `C${i}`));
      for (const i of cv.robbers) el.appendChild(piece("robber", `R${i}`));
      if (onCell && cv.highlight) {
        el.addEventListener("click", () => onCell([x, y]));
      }
      root.appendChild(el);
    }
  }
}

function piece(kind: "cop" | "robber", label: string): HTMLElement {
  const el = document.createElement("span");
  el.className = `piece ${kind}`;
  el.textContent = label;
  return el;
}

export function renderBadges(root: HTMLElement, view: BoardView): void {
  root.innerHTML = "";
  for (const badge of view.badges) {
    const el = document.createElement("div");
    el.className = "badge";
    el.textContent = `robber ${badge.robber}: ${badge.text}`;
    root.appendChild(el);
  }
}

export function renderBanner(root: HTMLElement, view: BoardView): void {
  root.textContent = view.banner ?? "";
  root.classList.toggle("shown", view.banner !== null);
}

export function setStatus(root: HTMLElement, text: string): void {
  root.textContent = text;
}

export function showNotice(root: HTMLElement, text: string, retry: (() => void) | null): void {
  root.innerHTML = "";
  if (!text) return;
  root.appendChild(document.createTextNode(text));
  if (retry) {
    const btn = document.createElement("button");
    btn.textContent = "retry";
    btn.addEventListener("click", retry);
    root.appendChild(btn);
  }
}
