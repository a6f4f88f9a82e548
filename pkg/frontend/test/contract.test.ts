// Contract tests against recorded service responses: the interface the
// UI relies on, and the three behaviors the front end must exhibit.

import { describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { App } from "../src/app.js";
import { fakeFetch, fixture } from "./helpers.js";

const losingGame = fixture("losing_game.json");
const losingSolve = fixture("losing_solve.json");
const winningGame = fixture("winning_game.json");
const winningSolve = fixture("winning_solve.json");
const session = fixture("winning_session.json");
const steps = fixture("winning_steps_o1_o1_o2.json");
const incompatible = fixture("incompatible_step.json");
const parseError = fixture("parse_error.json");

function appFor(routes: Parameters<typeof fakeFetch>[0]): App {
  return new App(new Client("", fakeFetch(routes)));
}

describe("loading and solving", () => {
  it("shows the losing verdict for the reference example", async () => {
    const app = appFor({
      "POST /games": { status: 201, body: losingGame },
      [`POST /games/${losingGame.id}/solve`]: { status: 200, body: losingSolve },
    });
    await app.loadAndSolve("whatever; the stub answers");
    expect(app.state.phase).toBe("solved");
    expect(app.state.game?.winning).toBe(false);
    expect(app.state.game?.verdictLabel).toBe("Player 1 loses");
  });

  it("shows the winning verdict and strategy for the modified example", async () => {
    const app = appFor({
      "POST /games": { status: 201, body: winningGame },
      [`POST /games/${winningGame.id}/solve`]: { status: 200, body: winningSolve },
    });
    await app.loadAndSolve("stubbed");
    expect(app.state.game?.verdictLabel).toBe("Player 1 wins");
    // rendered rows mirror the payload exactly
    expect(app.state.game?.strategy).toEqual(winningSolve.strategy);
    expect(app.state.game?.winningCells).toEqual(winningSolve.maxWinningCells);
  });

  it("surfaces parse errors inline with the line number", async () => {
    const app = appFor({
      "POST /games": { status: parseError.status, body: parseError.body },
    });
    await app.loadAndSolve("ALPHABET : a\nSTATES broken\n");
    expect(app.state.phase).toBe("idle");
    expect(app.state.error).toEqual({
      line: parseError.body.line,
      message: parseError.body.message,
    });
  });
});

describe("playing rounds", () => {
  async function playingApp(): Promise<App> {
    const app = appFor({
      "POST /games": { status: 201, body: winningGame },
      [`POST /games/${winningGame.id}/solve`]: { status: 200, body: winningSolve },
      [`POST /games/${winningGame.id}/sessions`]: { status: 201, body: session },
      [`POST /sessions/${session.id}/step`]: [
        { status: 200, body: steps[0] },
        { status: 200, body: steps[1] },
        { status: 200, body: steps[2] },
        { status: incompatible.status, body: incompatible.body },
      ],
    });
    await app.loadAndSolve("stubbed");
    await app.startSession();
    return app;
  }

  it("o1, o1, o2 moves the knowledge highlight through {1}, {1}, {2}", async () => {
    const app = await playingApp();
    expect(app.state.session?.knowledge).toEqual(session.knowledge);
    const seen: string[][] = [];
    for (const obs of ["o1", "o1", "o2"]) {
      await app.playRound({ observation: obs });
      seen.push(app.state.session?.knowledge ?? []);
    }
    expect(seen).toEqual([["1"], ["1"], ["2"]]);
    // each highlight equals the recorded API payload verbatim
    expect(seen).toEqual(steps.map((s: any) => s.knowledge));
    expect(app.state.session?.history.map((h) => h.observation)).toEqual(
      steps[2].history.map((h: any) => h.observation),
    );
  });

  it("an incompatible click never mutates the session state", async () => {
    const app = await playingApp();
    for (const obs of ["o1", "o1", "o2"]) {
      await app.playRound({ observation: obs });
    }
    const before = JSON.stringify(app.state.session);
    await app.playRound({ observation: "o1" });
    expect(app.state.toast).toBe("incompatible observation");
    expect(JSON.stringify(app.state.session)).toBe(before);
  });

  it("refuses to create sessions on losing games", async () => {
    const conflict = fixture("losing_session_conflict.json");
    const app = appFor({
      "POST /games": { status: 201, body: losingGame },
      [`POST /games/${losingGame.id}/solve`]: { status: 200, body: losingSolve },
      [`POST /games/${losingGame.id}/sessions`]: {
        status: conflict.status,
        body: conflict.body,
      },
    });
    await app.loadAndSolve("stubbed");
    await app.startSession();
    expect(app.state.session).toBeNull();
    expect(app.state.toast).toContain("losing");
  });
});
