// Typed client for the solver service. All game semantics live on the
// server; this file only moves JSON around.

export interface ObservationSummary {
  id: string;
  members: string[];
  priority: number;
}

export interface GameSummary {
  id: string;
  locations: string[];
  actions: string[];
  initial: string[];
  observations: ObservationSummary[];
  warnings: string[];
}

export interface StrategyTriple {
  cell: string[];
  rank: number;
  action: string;
}

export interface SolveStats {
  cpreCalls: number;
  bodyEvaluations: number;
  iterationsPerLevel: number[];
  times: Record<string, number>;
}

export interface SolveResult {
  winning: boolean;
  maxWinningCells: string[][];
  strategy: StrategyTriple[];
  stats: SolveStats;
}

export interface HistoryEntry {
  action: string;
  observation: string;
  knowledge: string[];
}

export type SessionStatus = "running" | "won" | "lost";

export interface SessionState {
  id: string;
  gameId: string;
  knowledge: string[];
  status: SessionStatus;
  seed: number;
  history: HistoryEntry[];
  action: string | null;
  compatible: string[];
}

export type StepChoice = { observation: string } | { random: true };

export interface ApiErrorBody {
  message: string;
  line?: number | null;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message ?? `request failed with ${status}`);
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const payload = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, payload as ApiErrorBody);
  }
  return payload as T;
}

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetcher: typeof fetch = fetch,
  ) {}

  uploadGame(text: string): Promise<GameSummary> {
    return this.request<GameSummary>("/games", {
      method: "POST",
      headers: { "content-type": "text/plain" },
      body: text,
    });
  }

  solve(gameId: string): Promise<SolveResult> {
    return this.request<SolveResult>(`/games/${gameId}/solve`, {
      method: "POST",
    });
  }

  createSession(gameId: string): Promise<SessionState> {
    return this.request<SessionState>(`/games/${gameId}/sessions`, {
      method: "POST",
    });
  }

  step(sessionId: string, choice: StepChoice): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${sessionId}/step`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(choice),
    });
  }

  private request<T>(path: string, init: RequestInit): Promise<T> {
    return this.fetcher(this.base + path, init).then((r) => parseResponse<T>(r));
  }
}
