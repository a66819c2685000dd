// Typed client for the play-session HTTP API. The server is authoritative:
// everything the UI shows is a projection of these payloads.

export type Team = "cops" | "robbers";
export type Cell = [number, number];

export interface ArenaJson {
  width: number;
  height: number;
  connectivity: string;
  cells: number[][]; // row-major kinds: -1 wall, 0 open, 1.. zone id
}

export interface MonitorJson {
  owed: number;
  inside: number;
  last: number;
  violated?: string;
}

export interface StateJson {
  cops: Cell[];
  robbers: Cell[];
  turn: Team;
  monitors: MonitorJson[];
}

export interface MoveJson {
  team: Team;
  destinations: Cell[];
}

export interface VerdictJson {
  winner: "system" | "environment";
  windowRelative: boolean;
  states: number;
  iterations: number;
  ms: number;
}

export interface Snapshot {
  id: string;
  state: StateJson;
  turn: "human" | "controller" | null;
  humanTeam: Team;
  controllerTeam: Team;
  systemTeam: Team;
  verdict: VerdictJson;
  legalMoves?: MoveJson[];
  outcome: string | null;
  moveCount: number;
  infoMode: { kind: string; obsRadius?: number };
  arena?: ArenaJson;
}

export interface BeliefOverlay {
  available: boolean;
  team?: Team;
  placements?: Cell[][];
  knownWalls?: Cell[];
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

type Fetcher = (input: string, init?: RequestInit) => Promise<Response>;

export class Api {
  constructor(
    private base = "",
    private fetcher: Fetcher = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetcher(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(scenario: unknown, humanTeam: Team): Promise<Snapshot> {
    return this.post("/sessions", { scenario, humanTeam });
  }

  getSession(id: string): Promise<Snapshot> {
    return this.request(`/sessions/${id}`);
  }

  move(id: string, destinations: Cell[]): Promise<Snapshot> {
    return this.post(`/sessions/${id}/move`, { destinations });
  }

  auto(id: string): Promise<Snapshot> {
    return this.post(`/sessions/${id}/auto`, {});
  }

  belief(id: string): Promise<BeliefOverlay> {
    return this.request(`/sessions/${id}/belief`);
  }
}
