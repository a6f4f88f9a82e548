"""Mutual-exclusion protocol synthesis as an imperfect-information game.

Two processes run a six-line loop around a critical section:

    1: wait for an arbitrary time (possibly forever)
    2: raise the own request flag
    3: hand over the turn variable to the other process
    4: spin while a guard condition holds
    5: critical section (left within one own step)
    6: lower the own flag, back to 1

The right process is fixed with guard "flag1 and turn == 1".  The left
process's guard is open: one of eight candidate conditions C1..C8 over
the shared variables, chosen once by the controller as the first move
of the game.  Everything else is adversarial: the per-line waiting at
line 1 and, through a strictly alternating scheduler token, the
interleaving of both processes.  The right program counter is invisible
to the controller; flags, turn, token and choice are visible.

The requirement is encoded as: never both processes at line 5 (the safe
set), and, per visible priorities, the left process must not stay
requesting forever.  Priorities on observations: left at line 3 or 4
maps to 1, left at line 5 maps to 0, everything else to 2, so a play
loses exactly when the left process is eventually stuck requesting.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .game import GameStructure, Observation

ALL_CHOICES = frozenset(range(1, 9))

# guard conditions selectable for line 4 of the left process
_CONDITIONS = {
    1: lambda f1, f2, turn: f1,
    2: lambda f1, f2, turn: f2,
    3: lambda f1, f2, turn: turn == 1,
    4: lambda f1, f2, turn: turn == 2,
    5: lambda f1, f2, turn: f1 and turn == 2,
    6: lambda f1, f2, turn: f1 and turn == 1,
    7: lambda f1, f2, turn: f2 and turn == 1,
    8: lambda f1, f2, turn: f2 and turn == 2,
}


@dataclass(frozen=True)
class _State:
    pc1: int
    pc2: int
    f1: int
    f2: int
    turn: int
    tok: int
    choice: int

    def name(self) -> str:
        return (
            f"s{self.pc1}{self.pc2}{self.f1}{self.f2}"
            f"{self.turn}{self.tok}{self.choice}"
        )

    def visible(self) -> tuple:
        return (self.pc1, self.f1, self.f2, self.turn, self.tok, self.choice)


_INITIAL = _State(1, 1, 0, 0, 1, 1, 0)


def _step_left(s: _State) -> list[_State]:
    nt = 3 - s.tok
    if s.pc1 == 1:
        return [
            _State(1, s.pc2, s.f1, s.f2, s.turn, nt, s.choice),
            _State(2, s.pc2, s.f1, s.f2, s.turn, nt, s.choice),
        ]
    if s.pc1 == 2:
        return [_State(3, s.pc2, 1, s.f2, s.turn, nt, s.choice)]
    if s.pc1 == 3:
        return [_State(4, s.pc2, s.f1, s.f2, 2, nt, s.choice)]
    if s.pc1 == 4:
        stuck = _CONDITIONS[s.choice](s.f1, s.f2, s.turn)
        pc = 4 if stuck else 5
        return [_State(pc, s.pc2, s.f1, s.f2, s.turn, nt, s.choice)]
    if s.pc1 == 5:
        return [_State(6, s.pc2, s.f1, s.f2, s.turn, nt, s.choice)]
    return [_State(1, s.pc2, 0, s.f2, s.turn, nt, s.choice)]


def _step_right(s: _State) -> list[_State]:
    nt = 3 - s.tok
    if s.pc2 == 1:
        return [
            _State(s.pc1, 1, s.f1, s.f2, s.turn, nt, s.choice),
            _State(s.pc1, 2, s.f1, s.f2, s.turn, nt, s.choice),
        ]
    if s.pc2 == 2:
        return [_State(s.pc1, 3, s.f1, 1, s.turn, nt, s.choice)]
    if s.pc2 == 3:
        return [_State(s.pc1, 4, s.f1, s.f2, 1, nt, s.choice)]
    if s.pc2 == 4:
        stuck = s.f1 and s.turn == 1
        pc = 4 if stuck else 5
        return [_State(s.pc1, pc, s.f1, s.f2, s.turn, nt, s.choice)]
    if s.pc2 == 5:
        return [_State(s.pc1, 6, s.f1, s.f2, s.turn, nt, s.choice)]
    return [_State(s.pc1, 1, s.f1, 0, s.turn, nt, s.choice)]


def _successors(s: _State, action: int, allowed: frozenset[int]) -> list[_State]:
    if s.choice == 0:
        pick = action + 1 if action + 1 in allowed else min(allowed)
        return [_State(1, 1, 0, 0, 1, 1, pick)]
    return _step_left(s) if s.tok == 1 else _step_right(s)


def _priority(pc1: int) -> int:
    if pc1 in (3, 4):
        return 1
    if pc1 == 5:
        return 0
    return 2


def build_game(allowed: frozenset[int] = ALL_CHOICES) -> GameStructure:
    """The reachable product game for the given set of candidate guards."""
    if not allowed or not allowed <= ALL_CHOICES:
        raise ValueError("allowed guard choices must be a nonempty subset of 1..8")
    actions = tuple(f"C{k}" for k in range(1, 9))
    states: list[_State] = []
    index: dict[_State, int] = {}
    queue = deque([_INITIAL])
    index[_INITIAL] = 0
    states.append(_INITIAL)
    delta_sets: list[list[list[int]]] = []
    while queue:
        s = queue.popleft()
        row = []
        for a in range(len(actions)):
            succs = []
            for t in _successors(s, a, allowed):
                assert t.f1 == int(t.pc1 in (3, 4, 5, 6))
                assert t.f2 == int(t.pc2 in (3, 4, 5, 6))
                if t not in index:
                    index[t] = len(states)
                    states.append(t)
                    queue.append(t)
                succs.append(index[t])
            row.append(succs)
        delta_sets.append(row)

    groups: dict[tuple, list[int]] = {}
    for i, s in enumerate(states):
        groups.setdefault(s.visible(), []).append(i)
    observations = tuple(
        Observation(f"o{k + 1}", frozenset(members), _priority(key[0]))
        for k, (key, members) in enumerate(groups.items())
    )
    collisions = frozenset(
        i for i, s in enumerate(states) if s.pc1 == 5 and s.pc2 == 5
    )
    game = GameStructure(
        locations=tuple(s.name() for s in states),
        actions=actions,
        initial=(0,),
        delta=tuple(
            tuple(tuple(sorted(set(row))) for row in rows) for rows in delta_sets
        ),
        observations=observations,
        safe=frozenset(range(len(states))) - collisions,
        target=frozenset(),
    )
    game.validate()
    return game
