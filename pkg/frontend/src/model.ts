// Pure projections from server payloads to render state. Nothing here
// re-implements game rules: legality comes from the server's move list,
// obligations from the monitor fields it sends back.

import type {
  ArenaJson,
  BeliefOverlay,
  Cell,
  MonitorJson,
  MoveJson,
  Snapshot,
} from "./api.js";

export interface CellView {
  kind: "open" | "wall" | "zone";
  zone: number; // 0 when not a zone
  cops: number[]; // member indices standing here
  robbers: number[];
  highlight: boolean; // clickable for the pending selection
  selected: boolean; // already chosen this turn
  beliefHits: number; // placements that put an opponent here
  knownWall: boolean;
}

export interface Badge {
  robber: number;
  text: string;
}

export interface BoardView {
  width: number;
  height: number;
  cells: CellView[][]; // [y][x]
  badges: Badge[];
  banner: string | null;
  beliefShown: boolean;
}

const same = (a: Cell, b: Cell) => a[0] === b[0] && a[1] === b[1];

export function zoneCount(arena: ArenaJson): number {
  let top = 0;
  for (const row of arena.cells) {
    for (const k of row) if (k > top) top = k;
  }
  return top;
}

/** Pick one destination per team member, restricted to the server's list. */
export class MoveSelection {
  chosen: Cell[] = [];

  constructor(private moves: MoveJson[]) {}

  private matching(): MoveJson[] {
    return this.moves.filter((m) =>
      this.chosen.every((c, i) => same(m.destinations[i]!, c)),
    );
  }

  /** Cells the next member may go to, given what is already chosen. */
  options(): Cell[] {
    const seen = new Set<string>();
    const out: Cell[] = [];
    for (const m of this.matching()) {
      const dest = m.destinations[this.chosen.length];
      if (dest === undefined) continue;
      const key = `${dest[0]},${dest[1]}`;
      if (!seen.has(key)) {
        seen.add(key);
        out.push(dest);
      }
    }
    return out;
  }

  /** Accept a click; returns false when the cell is not a legal option. */
  pick(cell: Cell): boolean {
    if (!this.options().some((c) => same(c, cell))) return false;
    this.chosen.push(cell);
    return true;
  }

  complete(): boolean {
    return this.moves.length > 0 && this.chosen.length === this.moves[0]!.destinations.length;
  }

  /** The full joint move; only valid once complete. */
  destinations(): Cell[] {
    return this.chosen.slice();
  }

  reset(): void {
    this.chosen = [];
  }
}

/** Obligation badge for one robber, or null when nothing is pending. */
export function badgeText(mon: MonitorJson, zones: number): string | null {
  if (mon.violated) return `violated: ${mon.violated}`;
  if (mon.inside > 0) {
    const owe = zones === 2 ? `owe zone ${3 - mon.last}` : "owe another zone";
    return `${owe}, countdown ${3 - mon.inside}`;
  }
  if (mon.owed > 0) return `owe zone ${mon.owed}`;
  return null;
}

export function bannerText(snap: Snapshot): string | null {
  switch (snap.outcome) {
    case null:
      return null;
    case "capture":
      return "RobberCaught";
    case "violation": {
      const broken = snap.state.monitors.find((m) => m.violated);
      return broken ? `Violation(${broken.violated})` : "Violation";
    }
    case "cops_stuck":
      return "Cops cornered: no legal move";
    case "robbers_stuck":
      return "Robbers cornered: no legal move";
    default:
      return snap.outcome;
  }
}

export function buildBoardView(
  snap: Snapshot,
  arena: ArenaJson,
  belief: BeliefOverlay | null,
  selection: MoveSelection | null,
): BoardView {
  const cells: CellView[][] = arena.cells.map((row) =>
    row.map((k) => ({
      kind: k < 0 ? "wall" : k > 0 ? "zone" : "open",
      zone: k > 0 ? k : 0,
      cops: [],
      robbers: [],
      highlight: false,
      selected: false,
      beliefHits: 0,
      knownWall: false,
    })),
  );
  const at = (c: Cell): CellView | undefined => cells[c[1]]?.[c[0]];

  snap.state.cops.forEach((c, i) => at(c)?.cops.push(i));
  snap.state.robbers.forEach((c, i) => at(c)?.robbers.push(i));

  if (selection) {
    for (const c of selection.options()) {
      const cv = at(c);
      if (cv) cv.highlight = true;
    }
    for (const c of selection.chosen) {
      const cv = at(c);
      if (cv) cv.selected = true;
    }
  }

  const beliefShown = belief?.available === true;
  if (beliefShown && belief) {
    for (const placement of belief.placements ?? []) {
      for (const c of placement) {
        const cv = at(c);
        if (cv) cv.beliefHits += 1;
      }
    }
    for (const c of belief.knownWalls ?? []) {
      const cv = at(c);
      if (cv) cv.knownWall = true;
    }
  }

  const zones = zoneCount(arena);
  const badges: Badge[] = [];
  snap.state.monitors.forEach((mon, i) => {
    const text = badgeText(mon, zones);
    if (text) badges.push({ robber: i, text });
  });

  return {
    width: arena.width,
    height: arena.height,
    cells,
    badges,
    banner: bannerText(snap),
    beliefShown,
  };
}
