"""Controllable predecessor over antichains, enumerative and symbolic.

CPre(q) is the antichain of maximal cells s such that some action
forces, for every observation, the next knowledge cell into the
downward closure of q:

    CPre(q) = max { s | exists action, forall obs o,
                        exists s' in q: post(s) /\\ gamma(o) subset-of s' }

The enumerative implementation builds candidate cells per action from a
choice of covering element per observation.  The symbolic one encodes
sets of cells over one boolean variable per location (linear encoding),
single cells over log-many variables (logarithmic encoding), and
observation indices over a third block, and evaluates

    CP_sigma = forall b . valid(b) ->
                 OR_k AND_i (x_i -> [forall y . (T_sigma(l_i) and B) -> S_k])

where B constrains the logarithmic successor variables to the
observation selected by b.  Maximal elements are extracted with a
strict-inclusion relation over a primed copy of the linear block and
decoded by satisfying-assignment enumeration; beyond a size threshold
an equivalent direct walk of the diagram produces the same antichain
without materializing the primed copy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .antichain import Antichain, Cell
from .dd import FALSE, TRUE, CapacityError, DDManager
from .game import GameStructure

logger = logging.getLogger(__name__)

# games up to this many locations use the primed-copy extraction formula;
# larger games walk the diagram directly (identical result, output-sensitive)
MAX_EXTRACT_FORMULA = 64


# -- enumerative ------------------------------------------------------------


def cpre_enumerative(game: GameStructure, q: Antichain) -> Antichain:
    """Controllable predecessor, candidate construction with pruning."""
    return _cpre_enum_masks(game, q, None)


def cpre_enumerative_within(
    game: GameStructure, q: Antichain, masks: list[int]
) -> Antichain:
    """Maximal cells of down(CPre(q)) contained in one of the given masks."""
    return _cpre_enum_masks(game, q, masks)


def _cpre_enum_masks(
    game: GameStructure, q: Antichain, masks: list[int] | None
) -> Antichain:
    n = game.width
    if q.width != n:
        raise ValueError("antichain width mismatch")
    if not q:
        return Antichain.empty(n)
    full = (1 << n) - 1
    q_bits = [e.bits for e in q.elements]
    candidates: set[int] = set()
    for a in range(len(game.actions)):
        # per constrained observation, the maximal "allowed source" sets,
        # one per distinct useful choice of covering antichain element
        constrained: list[list[int]] = []
        skip_action = False
        for o in range(len(game.observations)):
            omask = game.obs_masks[o]
            succ = _succ_in_obs(game, a, o)
            if not succ:
                continue
            options: set[int] = set()
            for sb in q_bits:
                r = sb & omask
                allowed = full
                for i, si in succ:
                    if si & ~r:
                        allowed &= ~(1 << i)
                options.add(allowed)
            if full in options:
                continue
            opts = _maximal_bits(options)
            if opts == [0]:
                skip_action = True
                break
            constrained.append(opts)
        if skip_action:
            continue
        constrained.sort(key=len)
        for tmask in masks if masks is not None else [full]:
            found: list[int] = []
            visited: set[tuple[int, int]] = set()

            def descend(idx: int, cur: int) -> None:
                if cur == 0 or (idx, cur) in visited:
                    return
                visited.add((idx, cur))
                if any(cur & ~f == 0 for f in found):
                    return
                if idx == len(constrained):
                    found.append(cur)
                    return
                seen_here: set[int] = set()
                for allowed in constrained[idx]:
                    nxt = cur & allowed
                    if nxt not in seen_here:
                        seen_here.add(nxt)
                        descend(idx + 1, nxt)

            descend(0, tmask)
            candidates.update(found)
    return Antichain.of((Cell(b, n) for b in candidates), n)


def _succ_in_obs(game: GameStructure, a: int, o: int) -> list[tuple[int, int]]:
    """(source, successor-mask) pairs with a nonempty successor set inside obs o."""
    omask = game.obs_masks[o]
    out = []
    for i in range(game.width):
        si = 0
        for j in game.delta[i][a]:
            si |= 1 << j
        si &= omask
        if si:
            out.append((i, si))
    return out


def _maximal_bits(bits: set[int]) -> list[int]:
    items = sorted(bits, key=lambda b: (-b.bit_count(), b))
    kept: list[int] = []
    for b in items:
        if not any(b & ~k == 0 for k in kept):
            kept.append(b)
    return kept


# -- symbolic ---------------------------------------------------------------


@dataclass
class SymbolicContext:
    """Variable blocks and fixed diagrams for one game's symbolic CPre."""

    game: GameStructure
    man: DDManager
    x_vars: list[int]
    xp_vars: list[int]
    y_vars: list[int]
    b_vars: list[int]
    # T[a][i]: successor set of location i under action a, logarithmic encoding
    T: list[list[int]]
    # C[o]: member set of observation o, logarithmic encoding
    C: list[int]
    B_gamma: int
    valid_b: int
    # sources[a][o]: (location, successors-inside-o diagram) pairs, nonempty only
    sources: list[list[list[tuple[int, int]]]]
    # hashable identity of each sources list, shared between identical actions
    source_keys: list[list[tuple]]
    s_cache: dict[int, int] = field(default_factory=dict)
    cp_cache: dict[tuple[tuple[int, ...], bool], int] = field(default_factory=dict)
    # per-observation slices, keyed by sources identity and restriction set;
    # actions with identical transitions share entries
    slice_cache: dict[tuple, int] = field(default_factory=dict)
    omega_cache: int | None = None
    cpre_calls: int = 0

    def s_diagram(self, bits: int) -> int:
        """Logarithmic encoding of one cell, cached per bit pattern."""
        found = self.s_cache.get(bits)
        if found is None:
            found = self.man.disjoin(
                [_code_cube(self.man, self.y_vars, i) for i in _iter_bits(bits)]
            )
            self.s_cache[bits] = found
        return found


def _iter_bits(bits: int):
    while bits:
        yield (bits & -bits).bit_length() - 1
        bits &= bits - 1


def _code_cube(man: DDManager, variables: list[int], value: int) -> int:
    """Cube asserting that the variable block spells `value` in binary."""
    return man.cube({v: bool(value >> k & 1) for k, v in enumerate(variables)})


def build_symbolic_context(
    game: GameStructure, var_cap: int = 20000, x_first: bool = False
) -> SymbolicContext:
    """Allocate variable blocks and build the per-game diagrams.

    The default order puts the observation block on top, then the
    logarithmic block, then the linear block interleaved with its primed
    copy; `x_first` flips the linear blocks to the top for experiments.
    """
    n = game.width
    p = len(game.observations)
    m = (n - 1).bit_length() if n > 1 else 0
    nb = (p - 1).bit_length() if p > 1 else 0
    total = 2 * n + m + nb
    if total > var_cap:
        raise CapacityError(f"{total} variables needed, cap is {var_cap}")
    man = DDManager(total)
    if x_first:
        x_vars = [2 * i for i in range(n)]
        xp_vars = [2 * i + 1 for i in range(n)]
        b_vars = list(range(2 * n, 2 * n + nb))
        y_vars = list(range(2 * n + nb, 2 * n + nb + m))
    else:
        b_vars = list(range(nb))
        y_vars = list(range(nb, nb + m))
        base = nb + m
        x_vars = [base + 2 * i for i in range(n)]
        xp_vars = [base + 2 * i + 1 for i in range(n)]

    T: list[list[int]] = []
    for a in range(len(game.actions)):
        row = []
        for i in range(n):
            d = man.disjoin([_code_cube(man, y_vars, j) for j in game.delta[i][a]])
            if d == FALSE:
                raise ValueError(
                    "transition relation not total: "
                    f"{game.locations[i]!r} on {game.actions[a]!r}"
                )
            row.append(d)
        T.append(row)
    C = [
        man.disjoin([_code_cube(man, y_vars, j) for j in sorted(obs.members)])
        for obs in game.observations
    ]
    B_gamma = man.conjoin(
        [man.apply("implies", _code_cube(man, b_vars, o), C[o]) for o in range(p)]
    )
    valid_b = man.disjoin([_code_cube(man, b_vars, o) for o in range(p)])
    sources: list[list[list[tuple[int, int]]]] = []
    for a in range(len(game.actions)):
        per_obs: list[list[tuple[int, int]]] = [[] for _ in range(p)]
        for i in range(n):
            for o in {game.obs_of[j] for j in game.delta[i][a]}:
                per_obs[o].append((i, man.apply("and", T[a][i], C[o])))
        sources.append([sorted(row) for row in per_obs])
    source_keys = [[tuple(row) for row in per_action] for per_action in sources]
    return SymbolicContext(
        game=game,
        man=man,
        x_vars=x_vars,
        xp_vars=xp_vars,
        y_vars=y_vars,
        b_vars=b_vars,
        T=T,
        C=C,
        B_gamma=B_gamma,
        valid_b=valid_b,
        sources=sources,
        source_keys=source_keys,
    )


def _cp_diagram(ctx: SymbolicContext, q: Antichain, primed: bool) -> int:
    """The set of cells with a forcing action, linear encoding.

    Evaluates, per action, the universal quantification over valid
    observation codes of the disjunction over antichain elements; with
    the observation block on top of the order this is the conjunction,
    over observations, of the per-observation slices of the body.
    """
    key = (q.key(), primed)
    found = ctx.cp_cache.get(key)
    if found is not None:
        return found
    man = ctx.man
    game = ctx.game
    xs = ctx.xp_vars if primed else ctx.x_vars
    restrictions = _restrictions_by_obs(ctx, q)
    per_action = []
    for a in range(len(game.actions)):
        slices = []
        for o in range(len(game.observations)):
            u = _obs_slice(ctx, restrictions[o], a, o, xs, primed)
            if u == FALSE:
                slices = [FALSE]
                break
            if u != TRUE:
                slices.append(u)
        per_action.append(man.conjoin(slices))
    cp = man.disjoin(per_action)
    ctx.cp_cache[key] = cp
    if not primed and logger.isEnabledFor(logging.DEBUG):
        counts = [man.model_count(f, xs) for f in per_action]
        logger.debug(
            "per-action forcing-set model counts for |q|=%d: %s", len(q), counts
        )
    return cp


def _restrictions_by_obs(ctx: SymbolicContext, q: Antichain) -> list[tuple[int, ...]]:
    """Distinct nonzero intersections of the antichain with each observation."""
    game = ctx.game
    per_obs: list[set[int]] = [set() for _ in game.observations]
    for e in q.elements:
        rest = e.bits
        while rest:
            o = game.obs_of[(rest & -rest).bit_length() - 1]
            per_obs[o].add(e.bits & game.obs_masks[o])
            rest &= ~game.obs_masks[o]
    return [tuple(sorted(s)) for s in per_obs]


def _obs_slice(
    ctx: SymbolicContext,
    restrictions: tuple[int, ...],
    a: int,
    o: int,
    xs: list[int],
    primed: bool,
) -> int:
    """Sources allowed by observation o: some q-element covers their successors."""
    man = ctx.man
    sources = ctx.sources[a][o]
    if not sources:
        return TRUE
    key = (ctx.source_keys[a][o], restrictions, primed)
    found = ctx.slice_cache.get(key)
    if found is not None:
        return found
    if not restrictions:
        # every choice leaves this observation uncovered: no source may be used
        result = man.cube({xs[i]: False for i, _ in sources})
    else:
        cubes = []
        for r in restrictions:
            s_r = ctx.s_diagram(r)
            lits = {}
            for i, tc in sources:
                covered = (
                    man.forall(ctx.y_vars, man.apply("implies", tc, s_r)) == TRUE
                )
                if not covered:
                    lits[xs[i]] = False
            cubes.append(man.cube(lits))
        result = man.disjoin(cubes)
    ctx.slice_cache[key] = result
    return result


def _omega(ctx: SymbolicContext) -> int:
    """Strict set inclusion between the linear block and its primed copy."""
    if ctx.omega_cache is not None:
        return ctx.omega_cache
    man = ctx.man
    subset = man.conjoin(
        [
            man.apply("implies", man.mk_var(x), man.mk_var(xp))
            for x, xp in zip(ctx.x_vars, ctx.xp_vars)
        ]
    )
    differ = man.disjoin(
        [
            man.apply("xor", man.mk_var(x), man.mk_var(xp))
            for x, xp in zip(ctx.x_vars, ctx.xp_vars)
        ]
    )
    ctx.omega_cache = man.apply("and", subset, differ)
    return ctx.omega_cache


def _decode(ctx: SymbolicContext, cp_max: int) -> Antichain:
    n = ctx.game.width
    by_var = sorted(range(n), key=lambda i: ctx.x_vars[i])
    cells = []
    for assignment in ctx.man.enumerate_sat(cp_max, ctx.x_vars):
        bits = 0
        for pos, val in enumerate(assignment):
            if val:
                bits |= 1 << by_var[pos]
        cells.append(Cell(bits, n))
    return Antichain.of(cells, n)


def _maximal_models(ctx: SymbolicContext, cp: int) -> Antichain:
    """Maximal satisfying cells of a downward-closed diagram over the x block.

    Variables absent along a path are irrelevant, hence set to one in a
    maximal model.  Each node is walked once; work is proportional to
    the number of models produced.
    """
    man = ctx.man
    n = ctx.game.width
    x_sorted = sorted(ctx.x_vars)
    loc_of_var = {v: i for i, v in enumerate(ctx.x_vars)}
    pos_of = {v: k for k, v in enumerate(x_sorted)}
    end = len(x_sorted)
    suffix = [0] * (end + 1)
    for k in range(end - 1, -1, -1):
        suffix[k] = suffix[k + 1] | (1 << loc_of_var[x_sorted[k]])

    def pos(u: int) -> int:
        return pos_of.get(man.top_var(u), end)

    def skipped(frm: int, to: int) -> int:
        return suffix[frm] & ~suffix[to]

    memo: dict[int, list[int]] = {}

    def rec(u: int) -> list[int]:
        """Maximal models over x positions >= pos(u), absent vars set to one."""
        if u == FALSE:
            return []
        if u == TRUE:
            return [0]
        found = memo.get(u)
        if found is not None:
            return found
        k = pos(u)
        var = x_sorted[k]
        bit = 1 << loc_of_var[var]
        lo, hi = man.cofactors(u, var)
        his = [bit | m | skipped(k + 1, pos(hi)) for m in rec(hi)]
        los = []
        for m in rec(lo):
            mm = m | skipped(k + 1, pos(lo))
            if not any(mm & ~h == 0 for h in his):
                los.append(mm)
        result = his + los
        memo[u] = result
        return result

    models = [m | skipped(0, pos(cp)) for m in rec(cp)]
    return Antichain.of((Cell(b, n) for b in models), n)


def cpre_symbolic(ctx: SymbolicContext, q: Antichain) -> Antichain:
    """Controllable predecessor via the decision-diagram encoding."""
    if q.width != ctx.game.width:
        raise ValueError("antichain width mismatch")
    ctx.cpre_calls += 1
    if not q:
        return Antichain.empty(ctx.game.width)
    man = ctx.man
    cp = _cp_diagram(ctx, q, primed=False)
    if cp == FALSE:
        return Antichain.empty(ctx.game.width)
    if ctx.game.width <= MAX_EXTRACT_FORMULA:
        cp_primed = _cp_diagram(ctx, q, primed=True)
        dominated = man.and_exists(ctx.xp_vars, _omega(ctx), cp_primed)
        cp_max = man.apply("and", cp, man.neg(dominated))
        result = _decode(ctx, cp_max)
    else:
        result = _maximal_models(ctx, cp)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "cpre_symbolic: |q|=%d -> |result|=%d, %d nodes",
            len(q),
            len(result),
            len(man),
        )
    return result


def cpre_symbolic_within(
    ctx: SymbolicContext, q: Antichain, masks: list[int]
) -> Antichain:
    """Maximal cells of down(CPre(q)) within the given masks.

    Decoding the diagram through one observation's locations at a time
    keeps the enumeration small even when the unrestricted antichain
    would be huge; variables outside the mask are forced to zero during
    the walk instead of building a restricted diagram per mask.
    """
    n = ctx.game.width
    ctx.cpre_calls += 1
    if not q:
        return Antichain.empty(n)
    cp = _cp_diagram(ctx, q, primed=False)
    if cp == FALSE:
        return Antichain.empty(n)
    man = ctx.man
    x_sorted = sorted(ctx.x_vars)
    loc_of_var = {v: i for i, v in enumerate(ctx.x_vars)}
    pos_of = {v: k for k, v in enumerate(x_sorted)}
    end = len(x_sorted)
    suffix = [0] * (end + 1)
    for k in range(end - 1, -1, -1):
        suffix[k] = suffix[k + 1] | (1 << loc_of_var[x_sorted[k]])

    def pos(u: int) -> int:
        return pos_of.get(man.top_var(u), end)

    # satisfiability with every remaining variable zero: follow low edges
    zero_sat: dict[int, bool] = {}

    def zsat(u: int) -> bool:
        seenpath = []
        while u > TRUE and u not in zero_sat:
            seenpath.append(u)
            u = man.cofactors(u, man.top_var(u))[0]
        value = zero_sat.get(u, u == TRUE)
        for w in seenpath:
            zero_sat[w] = value
        return value

    cells: list[Cell] = []
    for mask in masks:
        memo: dict[int, list[int]] = {}

        def rec(u: int) -> list[int]:
            """Maximal in-mask models over x positions >= pos(u)."""
            if u == FALSE:
                return []
            if u == TRUE:
                return [0]
            found = memo.get(u)
            if found is not None:
                return found
            k = pos(u)
            var = x_sorted[k]
            loc = loc_of_var[var]
            if suffix[k] & mask == 0:
                # no mask variable remains: evaluate the all-zero suffix
                result = [0] if zsat(u) else []
                memo[u] = result
                return result
            lo, hi = man.cofactors(u, var)
            los = [m | (_skip(k + 1, pos(lo)) & mask) for m in rec(lo)]
            if mask >> loc & 1:
                his = [
                    (1 << loc) | m | (_skip(k + 1, pos(hi)) & mask)
                    for m in rec(hi)
                ]
                result = his + [
                    m for m in los if not any(m & ~h == 0 for h in his)
                ]
            else:
                result = los
            memo[u] = result
            return result

        def _skip(frm: int, to: int) -> int:
            return suffix[frm] & ~suffix[to]

        for m in rec(cp):
            bits = m | (_skip(0, pos(cp)) & mask)
            if bits:
                cells.append(Cell(bits, n))
    return Antichain.of(cells, n)


