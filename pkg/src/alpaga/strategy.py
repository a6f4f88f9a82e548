"""Ranked strategy tables: lookup, simplification, verification.

A strategy is a list of triples (cell, rank, action); it plays, from a
knowledge cell s, the action of a minimal-rank triple whose cell
contains s.  Two rewrite rules shrink the table: rule 1 drops triples
dominated at lower rank by a larger cell, rule 2 drops a triple whose
action is repeated at higher rank on a larger cell with no interfering
triple in between.
"""

from __future__ import annotations

from dataclasses import dataclass

from .antichain import Cell, canonical_key
from .game import GameStructure


class NoCoveringTriple(Exception):
    """The cell is outside every triple: losing or uncovered."""


@dataclass(frozen=True)
class Triple:
    cell: Cell
    rank: int
    action: int


@dataclass(frozen=True)
class StrategyTable:
    triples: tuple[Triple, ...]
    width: int

    def __len__(self) -> int:
        return len(self.triples)

    def lookup(self, cell: Cell) -> tuple[int, int]:
        """Action and rank of a minimal-rank triple containing `cell`.

        Ties break by canonical cell order, then smaller action index;
        the table is kept in exactly this order.
        """
        b = cell.bits
        for t in self.triples:
            if b and b & ~t.cell.bits == 0:
                return t.action, t.rank
        raise NoCoveringTriple(f"no triple covers cell {cell.indices()}")

    def covers(self, cell: Cell) -> bool:
        b = cell.bits
        return bool(b) and any(b & ~t.cell.bits == 0 for t in self.triples)

    def render(self, game: GameStructure) -> str:
        lines = [
            f"rank {t.rank}: play {game.actions[t.action]} "
            f"on {t.cell.render(game.locations)}"
            for t in self.triples
        ]
        return "\n".join(lines)


def _sorted_table(triples: list[Triple], width: int) -> StrategyTable:
    triples = sorted(triples, key=lambda t: (t.rank, canonical_key(t.cell), t.action))
    return StrategyTable(tuple(triples), width)


def simplify_rule1(table: StrategyTable) -> StrategyTable:
    """Keep only triples maximal under: lower-or-equal rank and larger cell."""
    kept: list[Triple] = []
    for t in table.triples:
        dominated = False
        for u in table.triples:
            if u is t:
                continue
            if u.rank <= t.rank and t.cell.bits & ~u.cell.bits == 0:
                if u.rank == t.rank and u.cell.bits == t.cell.bits:
                    # mutual domination: keep the smaller action index
                    assert u.action != t.action, "duplicate triple"
                    dominated = u.action < t.action
                else:
                    dominated = True
            if dominated:
                break
        if not dominated:
            kept.append(t)
    return _sorted_table(kept, table.width)


def simplify_rule2(table: StrategyTable) -> StrategyTable:
    """Drop triples re-played at higher rank on a larger cell.

    Triple i goes when some j != i has the same action and a larger
    cell, provided every triple k with rank_i <= rank_k <= rank_j whose
    cell meets cell_i also plays that action.  The bound includes
    rank_j: with the deterministic tie-break of `lookup`, a
    different-action triple tied at rank_j could otherwise win the spot
    the deleted triple vacated, so the inclusive guard is exactly what
    keeps lookup unchanged on every covered cell.  Scans in ascending
    rank and restarts after each deletion.
    """
    triples = list(table.triples)
    changed = True
    while changed:
        changed = False
        for i, ti in enumerate(triples):
            for j, tj in enumerate(triples):
                if i == j or ti.action != tj.action:
                    continue
                if ti.cell.bits & ~tj.cell.bits != 0:
                    continue
                if ti.cell.bits == tj.cell.bits and ti.rank >= tj.rank:
                    continue
                guard = all(
                    tk.action == ti.action
                    for tk in triples
                    if ti.rank <= tk.rank <= tj.rank
                    and tk.cell.bits & ti.cell.bits
                )
                if guard:
                    del triples[i]
                    changed = True
                    break
            if changed:
                break
    return _sorted_table(triples, table.width)


def simplify(table: StrategyTable) -> StrategyTable:
    return simplify_rule2(simplify_rule1(table))


def verify_strategy(
    game: GameStructure, table: StrategyTable, initial: Cell
) -> bool:
    """Exhaustively check the strategy on its induced knowledge graph.

    From the initial cell, following the table's lookup against every
    compatible observation, the strategy wins iff no reachable cell
    contains the LOSE location, every reachable cell is covered, and
    no reachable cycle has an odd minimal priority (checked per odd
    priority on the subgraph of larger-or-equal priorities).
    """
    lose = game.lose_index
    nodes: dict[int, list[int]] = {}
    prio: dict[int, int] = {}
    stack = [initial.bits]
    while stack:
        bits = stack.pop()
        if bits in nodes:
            continue
        cell = Cell(bits, game.width)
        if lose is not None and lose in cell:
            return False
        try:
            action, _ = table.lookup(cell)
        except NoCoveringTriple:
            return False
        obs = game.obs_of[(bits & -bits).bit_length() - 1]
        prio[bits] = game.observations[obs].priority
        succs = []
        for o in game.compatible_observations(cell, action):
            nxt = game.knowledge_update(cell, action, o).bits
            succs.append(nxt)
            if nxt not in nodes:
                stack.append(nxt)
        nodes[bits] = succs
    odd_priorities = sorted({p for p in prio.values() if p % 2 == 1})
    for cutoff in odd_priorities:
        sub = {b for b, p in prio.items() if p >= cutoff}
        for component in _sccs(nodes, sub):
            cyclic = len(component) > 1 or (
                component[0] in nodes[component[0]]
            )
            if cyclic and any(prio[b] == cutoff for b in component):
                return False
    return True


def _sccs(graph: dict[int, list[int]], restrict: set[int]) -> list[list[int]]:
    """Tarjan condensation of the subgraph induced by `restrict`, iterative."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in graph:
        if root not in restrict or root in index:
            continue
        work = [(root, iter([v for v in graph[root] if v in restrict]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append(
                        (nxt, iter([v for v in graph[nxt] if v in restrict]))
                    )
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    v = stack.pop()
                    on_stack.discard(v)
                    comp.append(v)
                    if v == node:
                        break
                out.append(comp)
    return out
