"""Independent oracle and reproducible random games.

The oracle expands the knowledge-subset construction explicitly into a
perfect-information parity game (player-1 nodes are cells, player-2
nodes are cell/action pairs) and solves it with the classical recursive
attractor algorithm.  It is deliberately separate from the antichain
machinery so the two paths can check each other.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, replace

from .antichain import Cell
from .game import GameStructure, Observation

ORACLE_LOCATION_CAP = 16


class OracleCapacityError(Exception):
    """The explicit construction only scales to desk-size games."""


@dataclass
class KnowledgeGame:
    """Explicit two-player arena over reachable knowledge cells."""

    # node ids: even = player-1 cell nodes, odd = player-2 (cell, action) nodes
    owner: list[int]
    priority: list[int]
    succ: list[list[int]]
    initial: int
    cells: list[int]


def build_knowledge_game(game: GameStructure) -> KnowledgeGame:
    if game.width > ORACLE_LOCATION_CAP:
        raise OracleCapacityError(
            f"{game.width} locations exceed the oracle cap of {ORACLE_LOCATION_CAP}"
        )
    owner: list[int] = []
    priority: list[int] = []
    succ: list[list[int]] = []
    cells: list[int] = []
    node_of_cell: dict[int, int] = {}
    node_of_move: dict[tuple[int, int], int] = {}

    def cell_priority(bits: int) -> int:
        obs = game.obs_of[(bits & -bits).bit_length() - 1]
        return game.observations[obs].priority

    def add_cell(bits: int) -> int:
        found = node_of_cell.get(bits)
        if found is not None:
            return found
        node = len(owner)
        node_of_cell[bits] = node
        owner.append(1)
        priority.append(cell_priority(bits))
        succ.append([])
        cells.append(bits)
        return node

    init = game.initial_cell().bits
    frontier = [init]
    add_cell(init)
    while frontier:
        bits = frontier.pop()
        cell_node = node_of_cell[bits]
        cell = Cell(bits, game.width)
        for a in range(len(game.actions)):
            move = node_of_move.get((bits, a))
            if move is None:
                move = len(owner)
                node_of_move[(bits, a)] = move
                owner.append(2)
                # player-2 nodes inherit the priority of their source cell,
                # so cycle minima match the knowledge play exactly
                priority.append(cell_priority(bits))
                succ.append([])
                cells.append(bits)
                for o in game.compatible_observations(cell, a):
                    nxt = game.knowledge_update(cell, a, o).bits
                    if nxt not in node_of_cell:
                        frontier.append(nxt)
                    succ[move].append(add_cell(nxt))
            succ[cell_node].append(move)
    assert len(node_of_cell) <= (1 << game.width) - 1
    return KnowledgeGame(owner, priority, succ, node_of_cell[init], cells)


def zielonka(
    owner: list[int], priority: list[int], succ: list[list[int]]
) -> set[int]:
    """Nodes from which player 1 forces an even minimal recurring priority.

    Standard recursive decomposition on the minimal priority; expects a
    total successor relation (no dead ends).
    """
    pred: list[list[int]] = [[] for _ in owner]
    for u, vs in enumerate(succ):
        for v in vs:
            pred[v].append(u)

    def attractor(target: set[int], player: int, alive: set[int]) -> set[int]:
        out_degree = {
            u: sum(1 for v in succ[u] if v in alive) for u in alive
        }
        attr = set(target)
        queue = list(target)
        while queue:
            v = queue.pop()
            for u in pred[v]:
                if u not in alive or u in attr:
                    continue
                if owner[u] == player:
                    attr.add(u)
                    queue.append(u)
                else:
                    out_degree[u] -= 1
                    if out_degree[u] == 0:
                        attr.add(u)
                        queue.append(u)
        return attr

    def solve(alive: set[int]) -> tuple[set[int], set[int]]:
        if not alive:
            return set(), set()
        m = min(priority[u] for u in alive)
        player = 1 if m % 2 == 0 else 2
        bag = {u for u in alive if priority[u] == m}
        a = attractor(bag, player, alive)
        w1, w2 = solve(alive - a)
        mine, theirs = (w1, w2) if player == 1 else (w2, w1)
        if not theirs:
            return (alive, set()) if player == 1 else (set(), alive)
        b = attractor(theirs, 3 - player, alive)
        w1b, w2b = solve(alive - b)
        if player == 1:
            return w1b, w2b | b
        return w1b | b, w2b

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(owner) + 100))
    try:
        win1, _ = solve(set(range(len(owner))))
    finally:
        sys.setrecursionlimit(old)
    return win1


def oracle_solve(game: GameStructure) -> bool:
    """Is the initial cell winning?  Explicit construction, for small games."""
    kg = build_knowledge_game(game)
    return kg.initial in zielonka(kg.owner, kg.priority, kg.succ)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    n: int = 4
    num_actions: int = 2
    num_observations: int = 2
    max_priority: int = 1
    density: float = 0.3


def generate_game(cfg: GeneratorConfig) -> GameStructure:
    """Deterministic random game; valid and total by construction."""
    if cfg.n < 1 or cfg.num_actions < 1 or cfg.num_observations < 1:
        raise ValueError("need at least one location, action and observation")
    rng = random.Random(cfg.seed)
    n = cfg.n
    p = min(cfg.num_observations, n)
    obs_of = [rng.randrange(p) for _ in range(n)]
    # repair: move members out of crowded observations until all are inhabited
    counts = [0] * p
    for o in obs_of:
        counts[o] += 1
    for o in range(p):
        if counts[o]:
            continue
        crowded = [i for i in range(n) if counts[obs_of[i]] > 1]
        i = crowded[rng.randrange(len(crowded))]
        counts[obs_of[i]] -= 1
        obs_of[i] = o
        counts[o] = 1

    delta = []
    for i in range(n):
        row = []
        for a in range(cfg.num_actions):
            succs = {j for j in range(n) if rng.random() < cfg.density}
            if not succs:
                succs = {rng.randrange(n)}
            row.append(tuple(sorted(succs)))
        delta.append(tuple(row))
    observations = tuple(
        Observation(
            f"o{k + 1}",
            frozenset(i for i in range(n) if obs_of[i] == k),
            rng.randint(0, cfg.max_priority),
        )
        for k in range(p)
    )
    game = GameStructure(
        locations=tuple(f"s{i}" for i in range(n)),
        actions=tuple(chr(ord("a") + a) for a in range(cfg.num_actions)),
        initial=(0,),
        delta=tuple(delta),
        observations=observations,
        safe=frozenset(range(n)),
        target=frozenset(),
    )
    game.validate()
    return game


def sample_objective(
    game: GameStructure, rng, target_rate: float = 0.2, unsafe_rate: float = 0.15
) -> GameStructure:
    """Random safe/target sets on an existing game, keeping it valid."""
    n = game.width
    target = frozenset(i for i in range(n) if rng.random() < target_rate)
    unsafe = frozenset(
        i for i in range(n) if i not in target and rng.random() < unsafe_rate
    )
    out = replace(game, safe=frozenset(range(n)) - unsafe, target=target)
    out.validate()
    return out
