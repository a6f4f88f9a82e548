// Application controller: owns the state machine, talks to the API,
// exposes plain view models. The DOM layer subscribes to `onChange`.

import { ApiError, Client, type GameSummary, type SessionState, type StepChoice } from "./api.js";
import {
  gameView,
  inlineError,
  sessionView,
  type GameView,
  type InlineError,
  type SessionView,
} from "./model.js";
import { SerialQueue } from "./queue.js";

export interface AppState {
  phase: "idle" | "loading" | "solved" | "playing";
  game: GameView | null;
  session: SessionView | null;
  error: InlineError | null;
  toast: string | null;
}

export class App {
  state: AppState = {
    phase: "idle",
    game: null,
    session: null,
    error: null,
    toast: null,
  };
  onChange: (state: AppState) => void = () => undefined;

  private summary: GameSummary | null = null;
  private rawSession: SessionState | null = null;
  private steps = new SerialQueue();

  constructor(private readonly client: Client) {}

  private emit(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  async loadAndSolve(text: string): Promise<void> {
    this.emit({ phase: "loading", error: null, toast: null, session: null });
    try {
      const summary = await this.client.uploadGame(text);
      const result = await this.client.solve(summary.id);
      this.summary = summary;
      this.rawSession = null;
      this.emit({ phase: "solved", game: gameView(summary, result) });
    } catch (err) {
      this.summary = null;
      this.emit({
        phase: "idle",
        game: null,
        error: this.describe(err),
      });
    }
  }

  async startSession(): Promise<void> {
    if (!this.summary) {
      return;
    }
    try {
      const state = await this.client.createSession(this.summary.id);
      this.rawSession = state;
      this.emit({
        phase: "playing",
        session: sessionView(state, this.summary),
        toast: null,
      });
    } catch (err) {
      this.emit({ toast: this.describe(err).message });
    }
  }

  /** Apply one adversary choice; incompatible picks leave the session as is. */
  playRound(choice: StepChoice): Promise<void> {
    return this.steps.run(async () => {
      const session = this.rawSession;
      const summary = this.summary;
      if (!session || !summary || session.status !== "running") {
        return;
      }
      try {
        const state = await this.client.step(session.id, choice);
        this.rawSession = state;
        this.emit({ session: sessionView(state, summary), toast: null });
      } catch (err) {
        if (err instanceof ApiError && err.status === 422) {
          this.emit({ toast: "incompatible observation" });
          return;
        }
        this.emit({ toast: this.describe(err).message });
      }
    });
  }

  private describe(err: unknown): InlineError {
    if (err instanceof ApiError) {
      return inlineError(err.status, err.body);
    }
    return { line: null, message: err instanceof Error ? err.message : String(err) };
  }
}
