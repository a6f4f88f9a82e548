"""Interactive session engine: replay a strategy against an adversary.

The session holds the current knowledge cell.  Each round the strategy
proposes an action; the adversary (a human, or the session's seeded
generator) picks one of the observations compatible with that action,
and the knowledge is updated.  Reaching the WIN cell wins, reaching
LOSE or an uncovered cell loses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .antichain import Cell
from .game import GameStructure
from .strategy import NoCoveringTriple, StrategyTable

RUNNING = "running"
WON = "won"
LOST = "lost"

RANDOM = "random"


class IllegalState(Exception):
    """Operation requires a running session."""


class IncompatibleObservation(Exception):
    """The chosen observation cannot follow the proposed action."""


@dataclass
class HistoryEntry:
    action: str
    observation: str
    cell: list[str]


@dataclass
class Session:
    game: GameStructure
    strategy: StrategyTable
    knowledge: Cell
    seed: int
    status: str = RUNNING
    history: list[HistoryEntry] = field(default_factory=list)
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = random.Random(self.seed)


def _status_of(game: GameStructure, strategy: StrategyTable, cell: Cell) -> str:
    if game.win_index is not None and cell.bits == 1 << game.win_index:
        return WON
    if game.lose_index is not None and game.lose_index in cell:
        return LOST
    if not strategy.covers(cell):
        return LOST
    return RUNNING


def new_session(
    game: GameStructure, strategy: StrategyTable, seed: int = 0
) -> Session:
    """Start at the initial cell; immediately won or lost cells short-circuit."""
    cell = game.initial_cell()
    sess = Session(game, strategy, cell, seed)
    sess.status = _status_of(game, strategy, cell)
    return sess


def proposed_move(sess: Session) -> tuple[int, list[int]]:
    """Action played at the current knowledge, with compatible observations."""
    if sess.status != RUNNING:
        raise IllegalState(f"session is {sess.status}")
    try:
        action, _ = sess.strategy.lookup(sess.knowledge)
    except NoCoveringTriple:
        sess.status = LOST
        raise
    return action, sess.game.compatible_observations(sess.knowledge, action)


def step(sess: Session, choice: str) -> Session:
    """Apply the adversary's observation (or a seeded random one) in place."""
    action, compatible = proposed_move(sess)
    game = sess.game
    if choice == RANDOM:
        obs = compatible[sess._rng.randrange(len(compatible))]
    else:
        matches = [o for o in compatible if game.observations[o].id == choice]
        if not matches:
            raise IncompatibleObservation(
                f"observation {choice!r} is not compatible here"
            )
        obs = matches[0]
    sess.knowledge = game.knowledge_update(sess.knowledge, action, obs)
    sess.history.append(
        HistoryEntry(
            game.actions[action],
            game.observations[obs].id,
            [game.locations[i] for i in sess.knowledge.indices()],
        )
    )
    sess.status = _status_of(game, sess.strategy, sess.knowledge)
    return sess
