// Session wiring: one active session per tab, server authoritative. Every
// render is a projection of the latest GET; refresh always resyncs.

import { Api, ApiError } from "./api.js";
import type { ArenaJson, BeliefOverlay, Cell, Snapshot, Team } from "./api.js";
import { buildBoardView, MoveSelection } from "./model.js";
import {
  renderBadges,
  renderBanner,
  renderBoard,
  setStatus,
  showNotice,
} from "./render.js";

const PRESETS: Record<string, unknown> = {
  "3-path pursuit (play the cop)": {
    arena: "C.R",
    variant: "CopPursuit",
  },
  "two-cop corner (play the cops)": {
    arena: "CC.R\n....\n....",
    variant: "CopPursuit",
  },
  "zone shuttle (play the robber)": {
    arena: "..1..\n.###.\nC###R\n.###.\n..2..",
    variant: "SafeZoneLiveness",
    moveRule: "AllowStay",
  },
  "hidden robber corridor (play the cop)": {
    arena: "C....R",
    variant: "CopPursuit",
    infoMode: { kind: "zi", obsRadius: 1 },
  },
};

const $ = (id: string) => document.getElementById(id) as HTMLElement;

class App {
  private api = new Api();
  private sessionId: string | null = null;
  private snap: Snapshot | null = null;
  private arena: ArenaJson | null = null;
  private belief: BeliefOverlay | null = null;
  private selection: MoveSelection | null = null;

  start(): void {
    const picker = $("preset") as unknown as HTMLSelectElement;
    for (const name of Object.keys(PRESETS)) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      picker.appendChild(opt);
    }
    picker.addEventListener("change", () => {
      ($("scenario") as unknown as HTMLTextAreaElement).value = JSON.stringify(
        PRESETS[picker.value],
        null,
        2,
      );
    });
    picker.dispatchEvent(new Event("change"));

    $("new-session").addEventListener("click", () => void this.newSession());
    $("step").addEventListener("click", () => void this.stepController());
    $("refresh").addEventListener("click", () => void this.resync());
    $("export").addEventListener("click", () => this.exportScenario());
  }

  private scenarioText(): string {
    return ($("scenario") as unknown as HTMLTextAreaElement).value;
  }

  private humanTeam(): Team {
    const el = document.querySelector(
      "input[name=team]:checked",
    ) as HTMLInputElement;
    return el.value as Team;
  }

  private async guard<T>(work: () => Promise<T>, retry: () => void): Promise<T | null> {
    try {
      const result = await work();
      showNotice($("notice"), "", null);
      return result;
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.status === 409) {
          // out of turn: the indicator was stale, resync instead
          showNotice($("notice"), "out of turn, refreshing", null);
          void this.resync();
        } else {
          showNotice($("notice"), err.detail, null);
        }
      } else {
        showNotice($("notice"), "network failure", retry);
      }
      return null;
    }
  }

  private async newSession(): Promise<void> {
    let scenario: unknown;
    try {
      scenario = JSON.parse(this.scenarioText());
    } catch {
      showNotice($("notice"), "scenario is not valid JSON", null);
      return;
    }
    const snap = await this.guard(
      () => this.api.createSession(scenario, this.humanTeam()),
      () => void this.newSession(),
    );
    if (!snap) return;
    this.sessionId = snap.id;
    this.arena = snap.arena ?? null;
    this.accept(snap);
  }

  private async resync(): Promise<void> {
    if (!this.sessionId) return;
    const snap = await this.guard(
      () => this.api.getSession(this.sessionId!),
      () => void this.resync(),
    );
    if (snap) {
      this.arena = snap.arena ?? this.arena;
      this.accept(snap);
    }
  }

  private async stepController(): Promise<void> {
    if (!this.sessionId || !this.snap) return;
    const snap = await this.guard(
      () => this.api.auto(this.sessionId!),
      () => void this.stepController(),
    );
    if (snap) this.accept(snap);
  }

  private async submitMove(): Promise<void> {
    if (!this.sessionId || !this.selection?.complete()) return;
    const destinations = this.selection.destinations();
    const snap = await this.guard(
      () => this.api.move(this.sessionId!, destinations),
      () => void this.submitMove(),
    );
    if (snap) {
      this.accept(snap);
    } else {
      // e.g. 422 with the violated clause shown: do not advance, re-pick
      this.selection?.reset();
      this.render();
    }
  }

  private accept(snap: Snapshot): void {
    this.snap = snap;
    this.selection =
      snap.turn === "human" && snap.legalMoves
        ? new MoveSelection(snap.legalMoves)
        : null;
    void this.refreshBelief().then(() => this.render());
  }

  private async refreshBelief(): Promise<void> {
    this.belief = null;
    if (!this.sessionId || !this.snap) return;
    if (this.snap.infoMode.kind === "perfect") return; // overlay hidden
    try {
      this.belief = await this.api.belief(this.sessionId);
    } catch {
      this.belief = null; // overlay is optional decoration
    }
  }

  private onCell(cell: Cell): void {
    if (!this.selection) return;
    if (!this.selection.pick(cell)) return;
    if (this.selection.complete()) {
      void this.submitMove();
    } else {
      this.render();
    }
  }

  private exportScenario(): void {
    const blob = new Blob([this.scenarioText()], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "scenario.json";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  private render(): void {
    if (!this.snap || !this.arena) return;
    const view = buildBoardView(this.snap, this.arena, this.belief, this.selection);
    renderBoard($("board"), view, this.selection ? (c) => this.onCell(c) : null);
    renderBadges($("badges"), view);
    renderBanner($("banner"), view);
    const turn =
      this.snap.outcome !== null
        ? "game over"
        : this.snap.turn === "human"
          ? `your move (${this.snap.humanTeam})`
          : `controller to move (${this.snap.controllerTeam})`;
    setStatus(
      $("status"),
      `${turn} | verdict: ${this.snap.verdict.winner} | moves: ${this.snap.moveCount}`,
    );
    ($("step") as HTMLButtonElement).disabled =
      this.snap.turn !== "controller" || this.snap.outcome !== null;
  }
}

new App().start();
