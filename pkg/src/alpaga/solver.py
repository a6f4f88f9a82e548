"""Winning-region and strategy computation over antichains.

The tool objective is Reach(TARGET) or (Safe(SAFE) and visible parity).
`transform_objective` reduces it to pure visible parity by adding an
absorbing WIN location (priority 0) behind every target and an
absorbing LOSE location (priority 1) in front of every unsafe location.
`solve_parity` then evaluates the nested fixpoint

    W = fp X_0 . fp X_1 . ... . fp X_d . JOIN_i (P_i meet CPre(X_i))

over antichains, greatest fixpoints at even levels and least fixpoints
at odd levels, outermost level 0, with P_i the antichain of cells inside
priority-i observations.  During the confirming pass of the outer
fixpoint, every maximal cell entering the join is recorded together
with the antichain it was forced into; ranks are built from the
least-fixpoint iteration counters, and lookup of the minimal-rank
covering triple yields a winning strategy.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Protocol

from .antichain import Antichain, Cell, canonical_key
from .game import GameStructure, Observation
from .strategy import StrategyTable, Triple

logger = logging.getLogger(__name__)

WIN = "WIN"
LOSE = "LOSE"


class CPreWithin(Protocol):
    """Restricted controllable predecessor: maximal cells of down(CPre(q))
    lying inside one of the given location masks."""

    def __call__(self, q: Antichain, masks: list[int]) -> Antichain: ...


@dataclass(frozen=True)
class Objective:
    """Priority classes and safe/target cell families of a game."""

    priority_of: tuple[int, ...]
    safe_cells: Antichain
    target_cells: Antichain
    priority_classes: tuple[Antichain, ...]

    @classmethod
    def from_game(
        cls, game: GameStructure, priority_of: tuple[int, ...] | None = None
    ) -> "Objective":
        n = game.width
        if priority_of is None:
            priority_of = game.priorities()
        d = max(priority_of)
        classes = [
            Antichain.of(
                (
                    Cell(game.obs_masks[o], n)
                    for o in range(len(game.observations))
                    if priority_of[o] == i
                ),
                n,
            )
            for i in range(d + 1)
        ]
        safe_mask = _mask(game.safe)
        target_mask = _mask(game.target)
        safe_cells = Antichain.of((Cell(m & safe_mask, n) for m in game.obs_masks), n)
        target_cells = Antichain.of(
            (Cell(m & target_mask, n) for m in game.obs_masks), n
        )
        return cls(tuple(priority_of), safe_cells, target_cells, tuple(classes))


def _mask(indices) -> int:
    bits = 0
    for i in indices:
        bits |= 1 << i
    return bits


@dataclass
class SolveStats:
    cpre_calls: int = 0
    body_evaluations: int = 0
    iterations_per_level: list[int] = field(default_factory=list)
    times: dict[str, float] = field(default_factory=dict)


@dataclass
class SolveResult:
    game: GameStructure
    winning: Antichain
    strategy: StrategyTable
    stats: SolveStats

    @property
    def initial_winning(self) -> bool:
        return self.winning.member(self.game.initial_cell())


def _fresh_name(taken: set[str], base: str) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def transform_objective(game: GameStructure) -> GameStructure:
    """Reduce Reach(TARGET) or (Safe(SAFE) and parity) to pure parity.

    Appends absorbing WIN (fresh observation, priority 0) and LOSE
    (fresh observation, priority 1); transitions leaving a target
    location are redirected to WIN, transitions entering an unsafe
    non-target location to LOSE.  An initial cell entirely inside the
    target starts at WIN; an initial location that is unsafe and not a
    target starts the game at LOSE.
    """
    n = game.width
    taken = set(game.locations)
    win = n
    lose = n + 1
    locations = game.locations + (
        _fresh_name(taken, WIN),
        _fresh_name(taken, LOSE),
    )
    bad = set(range(n)) - game.safe - game.target

    def redirect(i: int, succs: tuple[int, ...]) -> tuple[int, ...]:
        if i in game.target:
            return (win,)
        return tuple(sorted({lose if j in bad else j for j in succs}))

    delta = tuple(
        tuple(redirect(i, game.delta[i][a]) for a in range(len(game.actions)))
        for i in range(n)
    ) + (
        tuple((win,) for _ in game.actions),
        tuple((lose,) for _ in game.actions),
    )
    observations = game.observations + (
        Observation(f"o{len(game.observations) + 1}", frozenset({win}), 0),
        Observation(f"o{len(game.observations) + 2}", frozenset({lose}), 1),
    )
    if all(i in game.target for i in game.initial):
        initial: tuple[int, ...] = (win,)
    elif any(i in bad for i in game.initial):
        initial = (lose,)
    else:
        initial = game.initial
    out = replace(
        game,
        locations=locations,
        initial=initial,
        delta=delta,
        observations=observations,
        safe=frozenset(range(n + 2)) - {lose},
        target=frozenset({win}),
        win_index=win,
        lose_index=lose,
    )
    out.validate()
    return out


def make_cpre(
    game: GameStructure, kind: str = "symbolic", x_first: bool = False
) -> tuple[CPreWithin, float]:
    """Build a restricted-CPre callable; returns it with the encode time."""
    from . import cpre as _cpre

    t0 = time.perf_counter()
    if kind == "enumerative":

        def call(q: Antichain, masks: list[int]) -> Antichain:
            return _cpre.cpre_enumerative_within(game, q, masks)

    elif kind == "symbolic":
        ctx = _cpre.build_symbolic_context(game, x_first=x_first)

        def call(q: Antichain, masks: list[int]) -> Antichain:
            return _cpre.cpre_symbolic_within(ctx, q, masks)

    else:
        raise ValueError(f"unknown CPre kind {kind!r}")
    return call, time.perf_counter() - t0


def witness_action(game: GameStructure, cell: Cell, q: Antichain) -> int:
    """Smallest action forcing every next knowledge cell into down(q)."""
    return _witness_batch(game, q, [cell])[0]


def _witness_batch(game: GameStructure, q: Antichain, cells: list[Cell]) -> list[int]:
    by_obs: dict[int, list[int]] = {}
    for e in q.elements:
        rest = e.bits
        while rest:
            o = game.obs_of[(rest & -rest).bit_length() - 1]
            by_obs.setdefault(o, []).append(e.bits)
            rest &= ~game.obs_masks[o]
    out = []
    for cell in cells:
        for a in range(len(game.actions)):
            post = game.post(cell, a).bits
            rest = post
            good = True
            while rest:
                o = game.obs_of[(rest & -rest).bit_length() - 1]
                piece = post & game.obs_masks[o]
                if not any(piece & ~eb == 0 for eb in by_obs.get(o, ())):
                    good = False
                    break
                rest &= ~game.obs_masks[o]
            if good:
                out.append(a)
                break
        else:
            raise ValueError(
                "no forcing action: cell is not a controllable predecessor"
            )
    return out


@dataclass
class _Recording:
    cell: Cell
    counters: tuple[int, ...]
    forced_into: Antichain


class _FixpointEngine:
    """Nested fixpoint evaluation with memoized CPre and triple recording."""

    def __init__(
        self,
        game: GameStructure,
        objective: Objective,
        cpre: CPreWithin,
        base: Antichain | None = None,
        check_monotone: bool = False,
    ):
        self.game = game
        self.objective = objective
        self.cpre = cpre
        self.base = base
        self.check_monotone = check_monotone
        self.n = game.width
        self.d = len(objective.priority_classes) - 1
        self.mu_levels = [i for i in range(self.d + 1) if i % 2 == 1]
        self.stats = SolveStats(iterations_per_level=[0] * (self.d + 1))
        self._cpre_memo: dict[tuple[tuple[int, ...], int], Antichain] = {}
        self._counters = {i: 0 for i in self.mu_levels}

    def run(self) -> tuple[Antichain, list[_Recording]]:
        return self._level(0, [None] * (self.d + 1))

    def _level(self, i: int, env: list[Antichain | None]):
        if i > self.d:
            return self._body(env)
        is_mu = i % 2 == 1
        x = Antichain.empty(self.n) if is_mu else Antichain.top(self.n)
        if is_mu:
            self._counters[i] = 0
        collected: list[_Recording] = []
        while True:
            if is_mu:
                self._counters[i] += 1
            self.stats.iterations_per_level[i] += 1
            env[i] = x
            value, recs = self._level(i + 1, env)
            if self.check_monotone:
                assert (
                    x.leq(value) if is_mu else value.leq(x)
                ), "fixpoint iteration is not monotone"
            if is_mu:
                # approximants grow: keep first appearances across iterations
                collected.extend(recs)
            else:
                # only the confirming pass sees the stabilized value
                collected = recs
            if value == x:
                env[i] = None
                return value, collected
            x = value

    def _body(self, env: list[Antichain | None]):
        self.stats.body_evaluations += 1
        recs: list[_Recording] = []
        counters = tuple(self._counters[i] for i in self.mu_levels)
        total = Antichain.empty(self.n) if self.base is None else self.base
        for i, p_class in enumerate(self.objective.priority_classes):
            x = env[i]
            assert x is not None
            if not p_class or not x:
                continue
            term = self._cpre_meet(x, p_class, i)
            for cell in term.elements:
                recs.append(_Recording(cell, counters, x))
            total = total.union(term)
        return total, recs

    def _cpre_meet(self, q: Antichain, p_class: Antichain, level: int) -> Antichain:
        key = (q.key(), level)
        found = self._cpre_memo.get(key)
        if found is None:
            masks = [e.bits for e in p_class.elements]
            found = self.cpre(q, masks)
            self._cpre_memo[key] = found
            self.stats.cpre_calls += 1
        return found


def _build_table(
    game: GameStructure,
    recordings: list[_Recording],
    base_cells: list[Cell] = (),
) -> StrategyTable:
    first: dict[int, _Recording] = {}
    for rec in recordings:
        if rec.cell.bits not in first:
            first[rec.cell.bits] = rec

    # witness actions, batched per distinct forced-into antichain
    groups: dict[tuple[int, ...], list[int]] = {}
    antichains: dict[tuple[int, ...], Antichain] = {}
    for bits, rec in first.items():
        k = rec.forced_into.key()
        groups.setdefault(k, []).append(bits)
        antichains[k] = rec.forced_into
    actions: dict[int, int] = {}
    for k, members in groups.items():
        cells = [Cell(b, game.width) for b in members]
        for b, a in zip(members, _witness_batch(game, antichains[k], cells)):
            actions[b] = a

    depth = max((len(r.counters) for r in first.values()), default=0)
    bases = [1] * depth
    for r in first.values():
        for k, c in enumerate(r.counters):
            bases[k] = max(bases[k], c + 1)
    scale = [1] * depth
    for k in range(depth - 2, -1, -1):
        scale[k] = scale[k + 1] * bases[k + 1]

    def flatten(counters: tuple[int, ...]) -> int:
        return sum(c * scale[k] for k, c in enumerate(counters))

    triples = [
        Triple(rec.cell, flatten(rec.counters), actions[bits])
        for bits, rec in first.items()
    ]
    for cell in base_cells:
        if cell.bits not in first:
            triples.append(Triple(cell, 0, 0))
    triples.sort(key=lambda t: (t.rank, canonical_key(t.cell), t.action))
    return StrategyTable(tuple(triples), game.width)


def solve_parity(
    game: GameStructure,
    cpre: CPreWithin,
    priority_of: tuple[int, ...] | None = None,
    base: Antichain | None = None,
    check_monotone: bool = False,
) -> SolveResult:
    """Winning antichain and ranked strategy for the visible parity objective.

    Expects a transformed, total game.  `priority_of` overrides the
    observation priorities and `base` joins a fixed antichain into every
    body evaluation; both serve the reachability/safety wrappers.
    """
    t0 = time.perf_counter()
    objective = Objective.from_game(game, priority_of)
    engine = _FixpointEngine(
        game, objective, cpre, base=base, check_monotone=check_monotone
    )
    winning, recordings = engine.run()
    base_cells = (
        [c for c in base.elements if winning.member(c)] if base is not None else []
    )
    table = _build_table(game, recordings, base_cells)
    engine.stats.times["solve"] = time.perf_counter() - t0
    for t in table.triples:
        assert winning.member(t.cell), "strategy cell outside the winning region"
    return SolveResult(game, winning, table, engine.stats)


def one_step_formula(
    game: GameStructure,
    cpre: CPreWithin,
    w: Antichain,
    priority_of: tuple[int, ...] | None = None,
    base: Antichain | None = None,
) -> Antichain:
    """One application of the body with every variable set to `w`."""
    objective = Objective.from_game(game, priority_of)
    total = Antichain.empty(game.width) if base is None else base
    for p_class in objective.priority_classes:
        if not p_class or not w:
            continue
        masks = [e.bits for e in p_class.elements]
        total = total.union(cpre(w, masks))
    return total


def solve_reach_and_safe(game: GameStructure, cpre: CPreWithin) -> SolveResult:
    """Least fixpoint for reaching TARGET while staying inside SAFE."""
    t0 = time.perf_counter()
    objective = Objective.from_game(game)
    stats = SolveStats(iterations_per_level=[0])
    n = game.width
    x = Antichain.empty(n)
    recordings: list[_Recording] = []
    safe_masks = [e.bits for e in objective.safe_cells.elements]
    counter = 0
    while True:
        counter += 1
        stats.iterations_per_level[0] += 1
        step = objective.target_cells
        if x:
            stats.cpre_calls += 1
            reach = cpre(x, safe_masks)
            for cell in reach.elements:
                recordings.append(_Recording(cell, (counter,), x))
            step = step.union(reach)
        if step == x:
            break
        x = step
    base_cells = [c for c in objective.target_cells.elements if x.member(c)]
    table = _build_table(game, recordings, base_cells)
    stats.times["solve"] = time.perf_counter() - t0
    return SolveResult(game, x, table, stats)


def solve_reach_or_safe(game: GameStructure, cpre: CPreWithin) -> SolveResult:
    """Reach TARGET or stay inside SAFE forever: the parity formula with
    safe observations at priority 0, the rest at 1, and the target cells
    joined into every body evaluation."""
    objective = Objective.from_game(game)
    safe_mask = _mask(game.safe)
    priority_of = tuple(
        0 if game.obs_masks[o] & ~safe_mask == 0 else 1
        for o in range(len(game.observations))
    )
    return solve_parity(game, cpre, priority_of=priority_of, base=objective.target_cells)
