// Pure view models. Every location list shown anywhere is copied
// verbatim from an API payload; nothing here recomputes successors or
// knowledge updates.

import type {
  GameSummary,
  SessionState,
  SolveResult,
  StrategyTriple,
} from "./api.js";

export interface ObservationGroup {
  id: string;
  priority: number;
  members: string[];
}

export interface GameView {
  gameId: string;
  verdictLabel: string;
  winning: boolean;
  groups: ObservationGroup[];
  initial: string[];
  winningCells: string[][];
  strategy: StrategyTriple[];
  warnings: string[];
}

export function gameView(summary: GameSummary, result: SolveResult): GameView {
  return {
    gameId: summary.id,
    winning: result.winning,
    verdictLabel: result.winning ? "Player 1 wins" : "Player 1 loses",
    groups: summary.observations.map((obs) => ({
      id: obs.id,
      priority: obs.priority,
      members: [...obs.members],
    })),
    initial: [...summary.initial],
    winningCells: result.maxWinningCells.map((cell) => [...cell]),
    strategy: result.strategy.map((t) => ({ ...t, cell: [...t.cell] })),
    warnings: [...summary.warnings],
  };
}

export interface ObservationChoice {
  id: string;
  priority: number;
}

export interface SessionView {
  sessionId: string;
  knowledge: string[];
  action: string | null;
  choices: ObservationChoice[];
  history: { round: number; action: string; observation: string; knowledge: string[] }[];
  status: string;
  banner: string;
  seed: number;
  playable: boolean;
}

const BANNERS: Record<string, string> = {
  running: "your move: pick an observation",
  won: "the strategy reached its objective",
  lost: "the strategy lost (this should not happen on a verified strategy)",
};

export function sessionView(
  state: SessionState,
  summary: GameSummary,
): SessionView {
  const priorityOf = new Map(
    summary.observations.map((obs) => [obs.id, obs.priority]),
  );
  return {
    sessionId: state.id,
    knowledge: [...state.knowledge],
    action: state.action,
    choices: state.compatible.map((id) => ({
      id,
      priority: priorityOf.get(id) ?? 0,
    })),
    history: state.history.map((entry, index) => ({
      round: index + 1,
      action: entry.action,
      observation: entry.observation,
      knowledge: [...entry.knowledge],
    })),
    status: state.status,
    banner: BANNERS[state.status] ?? state.status,
    seed: state.seed,
    playable: state.status === "running",
  };
}

export interface InlineError {
  line: number | null;
  message: string;
}

export function inlineError(status: number, body: { message: string; line?: number | null }): InlineError {
  return { line: body.line ?? null, message: body.message };
}
