"""Game structures with imperfect information and their text format.

A game is a finite set of locations with a total labelled transition
relation, an observation partition with one priority per observation,
and safe/target location sets.  The text format:

    ALPHABET : a, b          one line, comma-separated action names
    STATES : s1, s2          one line, comma-separated location names
    INIT : s1                one line, initial location(s)
    SAFE : s1, s2            optional; defaults to all locations
    TARGET :                 optional; defaults to empty
    TRANS :                  header line, then one transition per line:
    s1, s2, a                source, destination, label
    OBS :                    header line, then one observation per line:
    s1, s2 : 0               members, colon, priority

Sections appear in this order.  '#' starts a comment, blank lines are
ignored.  Names may not contain whitespace, '#', ',' or ':'; the name
SINK is reserved for the totalization sink.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from .antichain import Cell

SINK = "SINK"

SECTION_ORDER = ("ALPHABET", "STATES", "INIT", "SAFE", "TARGET", "TRANS", "OBS")
_OPTIONAL_SECTIONS = {"SAFE", "TARGET"}
_FORBIDDEN_CHARS = set(" \t#,:")


class GameError(Exception):
    """Invalid game description; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Observation:
    id: str
    members: frozenset[int]
    priority: int


@dataclass(frozen=True)
class GameStructure:
    """Immutable game arena; index-based throughout."""

    locations: tuple[str, ...]
    actions: tuple[str, ...]
    initial: tuple[int, ...]
    # delta[loc][act] is the sorted tuple of successor indices
    delta: tuple[tuple[tuple[int, ...], ...], ...]
    observations: tuple[Observation, ...]
    safe: frozenset[int]
    target: frozenset[int]
    # set by the objective transform, None on raw games
    win_index: int | None = None
    lose_index: int | None = None

    @property
    def width(self) -> int:
        return len(self.locations)

    @functools.cached_property
    def obs_of(self) -> tuple[int, ...]:
        """Observation index of each location."""
        out = [-1] * len(self.locations)
        for k, obs in enumerate(self.observations):
            for i in obs.members:
                out[i] = k
        return tuple(out)

    @functools.cached_property
    def obs_masks(self) -> tuple[int, ...]:
        """Bit mask of each observation's member set."""
        masks = []
        for obs in self.observations:
            m = 0
            for i in obs.members:
                m |= 1 << i
            masks.append(m)
        return tuple(masks)

    def location_index(self, name: str) -> int:
        try:
            return self.locations.index(name)
        except ValueError:
            raise GameError(f"unknown state {name!r}") from None

    def action_index(self, name: str) -> int:
        try:
            return self.actions.index(name)
        except ValueError:
            raise GameError(f"unknown label {name!r}") from None

    def initial_cell(self) -> Cell:
        return Cell.from_indices(self.initial, self.width)

    def post(self, cell: Cell, action: int) -> Cell:
        """Locations reachable from `cell` in one step under `action`."""
        bits = 0
        src = cell.bits
        row = 0
        while src:
            i = (src & -src).bit_length() - 1
            for j in self.delta[i][action]:
                row |= 1 << j
            src &= src - 1
        bits = row
        return Cell(bits, self.width)

    def knowledge_update(self, cell: Cell, action: int, obs: int) -> Cell:
        """Next knowledge: successors of `cell` under `action` observed as `obs`."""
        return Cell(self.post(cell, action).bits & self.obs_masks[obs], self.width)

    def compatible_observations(self, cell: Cell, action: int) -> list[int]:
        """Observation indices consistent with playing `action` from `cell`."""
        p = self.post(cell, action).bits
        return [k for k, m in enumerate(self.obs_masks) if p & m]

    def priorities(self) -> tuple[int, ...]:
        return tuple(o.priority for o in self.observations)

    def missing_pairs(self) -> list[tuple[int, int]]:
        return [
            (i, a)
            for i in range(len(self.locations))
            for a in range(len(self.actions))
            if not self.delta[i][a]
        ]

    def validate(self, require_total: bool = True) -> None:
        n = len(self.locations)
        if n == 0:
            raise GameError("no states declared")
        if not self.actions:
            raise GameError("empty alphabet")
        if not self.initial:
            raise GameError("no initial state")
        covered: set[int] = set()
        for obs in self.observations:
            if not obs.members:
                raise GameError(f"observation {obs.id} has no members")
            if obs.priority < 0:
                raise GameError(f"observation {obs.id} has negative priority")
            dup = covered & obs.members
            if dup:
                name = self.locations[min(dup)]
                raise GameError(f"state {name!r} belongs to several observations")
            covered |= obs.members
        if covered != set(range(n)):
            missing = sorted(set(range(n)) - covered)
            name = self.locations[missing[0]]
            raise GameError(f"state {name!r} belongs to no observation")
        init_obs = {self.obs_of[i] for i in self.initial}
        if len(init_obs) > 1:
            raise GameError("initial states do not share one observation")
        if require_total and self.missing_pairs():
            i, a = self.missing_pairs()[0]
            raise GameError(
                "transition relation not total: no transition from "
                f"{self.locations[i]!r} on {self.actions[a]!r}"
            )


@dataclass(frozen=True)
class ParseReport:
    game: GameStructure
    warnings: tuple[str, ...] = field(default=())


def _check_name(tok: str, line: int) -> str:
    if not tok:
        raise GameError("empty name", line)
    if any(ch in _FORBIDDEN_CHARS for ch in tok):
        raise GameError(f"illegal character in name {tok!r}", line)
    if tok == SINK:
        raise GameError(f"the name {SINK} is reserved", line)
    return tok


def _split_names(payload: str, line: int, allow_empty: bool = False) -> list[str]:
    payload = payload.strip()
    if not payload:
        if allow_empty:
            return []
        raise GameError("expected a comma-separated list", line)
    return [_check_name(tok.strip(), line) for tok in payload.split(",")]


def parse_game(text: str, totalize: bool = True) -> ParseReport:
    """Parse the text format; totalize the transition relation unless told not to."""
    # strip comments, keep (lineno, content) for nonblank lines
    lines: list[tuple[int, str]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            lines.append((no, content))

    sections: dict[str, tuple[int, str]] = {}
    body: dict[str, list[tuple[int, str]]] = {"TRANS": [], "OBS": []}
    current_block: str | None = None
    order_seen: list[str] = []
    for no, content in lines:
        head = content.split(":", 1)[0].strip()
        if head in SECTION_ORDER:
            if head in sections:
                raise GameError(f"duplicate section {head}", no)
            if ":" not in content:
                raise GameError(f"expected ':' after {head}", no)
            payload = content.split(":", 1)[1]
            sections[head] = (no, payload)
            order_seen.append(head)
            current_block = head if head in ("TRANS", "OBS") else None
            if head in ("TRANS", "OBS") and payload.strip():
                raise GameError(f"{head} takes no items on its own line", no)
        else:
            if current_block is None:
                raise GameError(f"unexpected line {content!r}", no)
            body[current_block].append((no, content))

    for key in SECTION_ORDER:
        if key not in sections and key not in _OPTIONAL_SECTIONS:
            raise GameError(f"missing section {key}")
    filtered = [k for k in order_seen]
    expected = [k for k in SECTION_ORDER if k in sections]
    if filtered != expected:
        raise GameError(
            "sections out of order: expected "
            + ", ".join(expected)
            + " but found "
            + ", ".join(filtered)
        )

    no, payload = sections["ALPHABET"]
    actions = _split_names(payload, no)
    if len(set(actions)) != len(actions):
        raise GameError("duplicate label in ALPHABET", no)

    no, payload = sections["STATES"]
    locations = _split_names(payload, no)
    if len(set(locations)) != len(locations):
        raise GameError("duplicate state in STATES", no)
    index = {name: i for i, name in enumerate(locations)}
    act_index = {name: a for a, name in enumerate(actions)}

    def state_ref(tok: str, line: int) -> int:
        if tok not in index:
            raise GameError(f"unknown state {tok!r}", line)
        return index[tok]

    no, payload = sections["INIT"]
    initial = tuple(state_ref(t, no) for t in _split_names(payload, no))

    if "SAFE" in sections:
        no, payload = sections["SAFE"]
        safe = frozenset(state_ref(t, no) for t in _split_names(payload, no, True))
    else:
        safe = frozenset(range(len(locations)))
    if "TARGET" in sections:
        no, payload = sections["TARGET"]
        target = frozenset(state_ref(t, no) for t in _split_names(payload, no, True))
    else:
        target = frozenset()

    succ: list[list[set[int]]] = [
        [set() for _ in actions] for _ in locations
    ]
    for no, content in body["TRANS"]:
        parts = [p.strip() for p in content.split(",")]
        if len(parts) != 3:
            raise GameError("expected 'source, destination, label'", no)
        src, dst, lab = (_check_name(p, no) for p in parts)
        if lab not in act_index:
            raise GameError(f"unknown label {lab!r}", no)
        succ[state_ref(src, no)][act_index[lab]].add(state_ref(dst, no))

    observations: list[Observation] = []
    seen_members: set[int] = set()
    for no, content in body["OBS"]:
        if ":" not in content:
            raise GameError("expected 'states : priority'", no)
        members_part, prio_part = content.rsplit(":", 1)
        members = frozenset(
            state_ref(t, no) for t in _split_names(members_part, no)
        )
        prio_text = prio_part.strip()
        if not prio_text.isdigit():
            raise GameError(f"malformed priority {prio_text!r}", no)
        dup = members & seen_members
        if dup:
            name = locations[min(dup)]
            raise GameError(f"state {name!r} belongs to several observations", no)
        seen_members |= members
        observations.append(
            Observation(f"o{len(observations) + 1}", members, int(prio_text))
        )
    if not observations:
        raise GameError("OBS section declares no observation")

    game = GameStructure(
        locations=tuple(locations),
        actions=tuple(actions),
        initial=initial,
        delta=tuple(
            tuple(tuple(sorted(s)) for s in row) for row in succ
        ),
        observations=tuple(observations),
        safe=safe,
        target=target,
    )
    game.validate(require_total=False)
    if totalize:
        return totalize_game(game)
    game.validate(require_total=True)
    return ParseReport(game)


def totalize_game(game: GameStructure) -> ParseReport:
    """Complete the transition relation with an absorbing SINK of priority 1."""
    missing = game.missing_pairs()
    if not missing:
        return ParseReport(game)
    sink = len(game.locations)
    locations = game.locations + (SINK,)
    delta = [list(map(set, row)) for row in game.delta]
    for i, a in missing:
        delta[i][a].add(sink)
    delta.append([{sink} for _ in game.actions])
    observations = game.observations + (
        Observation(f"o{len(game.observations) + 1}", frozenset({sink}), 1),
    )
    warnings = tuple(
        f"added transition: {game.locations[i]}, {SINK}, {game.actions[a]}"
        for i, a in missing
    )
    total = replace(
        game,
        locations=locations,
        delta=tuple(tuple(tuple(sorted(s)) for s in row) for row in delta),
        observations=observations,
        safe=game.safe | {sink},
    )
    total.validate(require_total=True)
    return ParseReport(total, warnings)


def render(game: GameStructure) -> str:
    """Inverse printer; `parse_game(render(g), totalize=False)` reproduces g."""
    out = []
    out.append("ALPHABET : " + ", ".join(game.actions))
    out.append("STATES : " + ", ".join(game.locations))
    out.append("INIT : " + ", ".join(game.locations[i] for i in game.initial))
    out.append("SAFE : " + ", ".join(game.locations[i] for i in sorted(game.safe)))
    out.append(
        "TARGET : " + ", ".join(game.locations[i] for i in sorted(game.target))
    )
    out.append("TRANS :")
    for i, name in enumerate(game.locations):
        for a, label in enumerate(game.actions):
            for j in game.delta[i][a]:
                out.append(f"{name}, {game.locations[j]}, {label}")
    out.append("OBS :")
    for obs in game.observations:
        members = ", ".join(game.locations[i] for i in sorted(obs.members))
        out.append(f"{members} : {obs.priority}")
    return "\n".join(out) + "\n"
