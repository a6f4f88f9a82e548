// DOM layer: renders the controller's view models and forwards clicks.
// All interactive elements are real <button>s, hence keyboard reachable.

import type { App, AppState } from "./app.js";
import type { GameView, SessionView } from "./model.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function chips(locations: string[], highlight?: Set<string>): HTMLElement {
  const wrap = el("span", "cell");
  for (const loc of locations) {
    const chip = el("span", "chip", loc);
    if (highlight?.has(loc)) {
      chip.classList.add("lit");
    }
    wrap.appendChild(chip);
  }
  return wrap;
}

function renderGame(view: GameView, app: App): HTMLElement {
  const root = el("section", "panel");
  const verdict = el(
    "p",
    view.winning ? "verdict wins" : "verdict loses",
    view.verdictLabel,
  );
  root.appendChild(verdict);

  for (const warning of view.warnings) {
    root.appendChild(el("p", "warning", warning));
  }

  const groups = el("div", "groups");
  for (const group of view.groups) {
    const box = el("div", "group");
    box.appendChild(el("h3", undefined, group.id));
    box.appendChild(el("span", "badge", `priority ${group.priority}`));
    box.appendChild(chips(group.members, new Set(view.initial)));
    groups.appendChild(box);
  }
  root.appendChild(groups);

  const cells = el("div", "winning");
  cells.appendChild(el("h3", undefined, "maximal winning cells"));
  for (const cell of view.winningCells) {
    cells.appendChild(chips(cell));
  }
  root.appendChild(cells);

  const table = el("table", "strategy");
  const head = el("tr");
  for (const caption of ["rank", "action", "cell"]) {
    head.appendChild(el("th", undefined, caption));
  }
  table.appendChild(head);
  for (const triple of view.strategy) {
    const row = el("tr");
    row.appendChild(el("td", undefined, String(triple.rank)));
    row.appendChild(el("td", undefined, triple.action));
    const cellBox = el("td");
    cellBox.appendChild(chips(triple.cell));
    row.appendChild(cellBox);
    table.appendChild(row);
  }
  root.appendChild(table);

  if (view.winning) {
    const start = el("button", "primary", "play against the strategy");
    start.addEventListener("click", () => void app.startSession());
    root.appendChild(start);
  }
  return root;
}

function renderSession(view: SessionView, app: App): HTMLElement {
  const root = el("section", "panel");
  root.appendChild(el("p", `banner ${view.status}`, view.banner));
  root.appendChild(el("p", "seed", `session seed ${view.seed}`));

  const knowledge = el("div", "knowledge");
  knowledge.appendChild(el("h3", undefined, "current knowledge"));
  knowledge.appendChild(chips(view.knowledge, new Set(view.knowledge)));
  root.appendChild(knowledge);

  if (view.action !== null) {
    root.appendChild(el("p", "move", `strategy plays: ${view.action}`));
  }

  const choices = el("div", "choices");
  for (const choice of view.choices) {
    const button = el(
      "button",
      "observation",
      `${choice.id} (priority ${choice.priority})`,
    );
    button.dataset.observation = choice.id;
    button.dataset.priority = String(choice.priority);
    button.disabled = !view.playable;
    button.addEventListener("click", () =>
      void app.playRound({ observation: choice.id }),
    );
    choices.appendChild(button);
  }
  const randomButton = el("button", "observation random", "random");
  randomButton.disabled = !view.playable;
  randomButton.addEventListener("click", () =>
    void app.playRound({ random: true }),
  );
  choices.appendChild(randomButton);
  root.appendChild(choices);

  const history = el("ol", "history");
  for (const entry of view.history) {
    const item = el(
      "li",
      undefined,
      `played ${entry.action}, saw ${entry.observation}, knowledge `,
    );
    item.appendChild(chips(entry.knowledge));
    history.appendChild(item);
  }
  root.appendChild(history);
  return root;
}

export function mount(app: App, root: HTMLElement): void {
  const input = el("textarea", "source");
  input.rows = 14;
  input.spellcheck = false;
  input.setAttribute("aria-label", "game description");
  const load = el("button", "primary", "load and solve");
  const errorBox = el("p", "error");
  errorBox.hidden = true;
  const toast = el("p", "toast");
  toast.hidden = true;
  const output = el("div", "output");

  load.addEventListener("click", () => void app.loadAndSolve(input.value));

  app.onChange = (state: AppState) => {
    errorBox.hidden = state.error === null;
    if (state.error) {
      errorBox.textContent =
        state.error.line !== null
          ? `line ${state.error.line}: ${state.error.message}`
          : state.error.message;
    }
    toast.hidden = state.toast === null;
    if (state.toast) {
      toast.textContent = state.toast;
    }
    output.replaceChildren();
    if (state.game) {
      output.appendChild(renderGame(state.game, app));
    }
    if (state.session) {
      output.appendChild(renderSession(state.session, app));
    }
  };

  root.replaceChildren(input, load, errorBox, toast, output);
}
