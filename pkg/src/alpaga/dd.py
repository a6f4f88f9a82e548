"""Reduced ordered binary decision diagrams.

A minimal kernel: one manager per solving task, a fixed variable order
chosen at creation, no complement edges, no reordering.  Nodes are
referenced by integer handles; handles 0 and 1 are the constants.
Canonicity holds by construction, so two handles are semantically equal
iff they are the same integer.
"""

from __future__ import annotations

from typing import Iterable, Iterator

FALSE = 0
TRUE = 1

_OPS = ("and", "or", "implies", "xor")


class CapacityError(Exception):
    """Node or variable budget exceeded."""


class DDManager:
    """Unique-node table and operation caches over a fixed variable order."""

    def __init__(self, num_vars: int, max_nodes: int = 8_000_000):
        self.num_vars = num_vars
        self.max_nodes = max_nodes
        # parallel arrays indexed by handle; level num_vars marks terminals
        self._var = [num_vars, num_vars]
        self._lo = [FALSE, TRUE]
        self._hi = [FALSE, TRUE]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}

    def __len__(self) -> int:
        return len(self._var)

    def clear_cache(self) -> None:
        self._cache.clear()

    def node(self, var: int, lo: int, hi: int) -> int:
        """Find-or-add; keeps the diagram reduced."""
        if lo == hi:
            return lo
        key = (var, lo, hi)
        found = self._unique.get(key)
        if found is not None:
            return found
        if len(self._var) >= self.max_nodes:
            raise CapacityError(f"more than {self.max_nodes} nodes")
        handle = len(self._var)
        self._var.append(var)
        self._lo.append(lo)
        self._hi.append(hi)
        self._unique[key] = handle
        return handle

    def mk_var(self, i: int) -> int:
        if not 0 <= i < self.num_vars:
            raise ValueError(f"variable index {i} out of range")
        return self.node(i, FALSE, TRUE)

    def top_var(self, u: int) -> int:
        return self._var[u]

    def cofactors(self, u: int, var: int) -> tuple[int, int]:
        if self._var[u] == var:
            return self._lo[u], self._hi[u]
        return u, u

    # -- boolean connectives ------------------------------------------------

    def apply(self, op: str, f: int, g: int) -> int:
        if op not in _OPS:
            raise ValueError(f"unknown operator {op!r}")
        return self._apply(op, f, g)

    def _apply(self, op: str, f: int, g: int) -> int:
        if f <= TRUE and g <= TRUE:
            a, b = bool(f), bool(g)
            if op == "and":
                v = a and b
            elif op == "or":
                v = a or b
            elif op == "implies":
                v = (not a) or b
            else:
                v = a != b
            return TRUE if v else FALSE
        # terminal shortcuts
        if op == "and":
            if f == FALSE or g == FALSE:
                return FALSE
            if f == TRUE:
                return g
            if g == TRUE:
                return f
            if f == g:
                return f
        elif op == "or":
            if f == TRUE or g == TRUE:
                return TRUE
            if f == FALSE:
                return g
            if g == FALSE:
                return f
            if f == g:
                return f
        elif op == "implies":
            if f == FALSE or g == TRUE:
                return TRUE
            if f == TRUE:
                return g
            if f == g:
                return TRUE
        else:
            if f == g:
                return FALSE
            if f == FALSE:
                return g
            if g == FALSE:
                return f
        if op in ("and", "or", "xor") and g < f:
            f, g = g, f
        key = (op, f, g)
        found = self._cache.get(key)
        if found is not None:
            return found
        var = min(self._var[f], self._var[g])
        f0, f1 = self.cofactors(f, var)
        g0, g1 = self.cofactors(g, var)
        r = self.node(var, self._apply(op, f0, g0), self._apply(op, f1, g1))
        self._cache[key] = r
        return r

    def neg(self, f: int) -> int:
        return self._apply("xor", f, TRUE)

    def ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        key = ("ite", f, g, h)
        found = self._cache.get(key)
        if found is not None:
            return found
        var = min(self._var[f], self._var[g], self._var[h])
        f0, f1 = self.cofactors(f, var)
        g0, g1 = self.cofactors(g, var)
        h0, h1 = self.cofactors(h, var)
        r = self.node(var, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self._cache[key] = r
        return r

    # -- quantification -----------------------------------------------------

    def quantify(self, kind: str, variables: Iterable[int], f: int) -> int:
        """Existential or universal abstraction over a variable block."""
        if kind not in ("exists", "forall"):
            raise ValueError(f"unknown quantifier {kind!r}")
        vs = frozenset(variables)
        if not vs:
            return f
        bad = [v for v in vs if not 0 <= v < self.num_vars]
        if bad:
            raise ValueError(f"variable index {bad[0]} out of range")
        return self._quantify(kind, vs, f)

    def _quantify(self, kind: str, vs: frozenset[int], f: int) -> int:
        if f <= TRUE:
            return f
        var = self._var[f]
        if all(v < var for v in vs):
            return f
        key = ("q", kind, vs, f)
        found = self._cache.get(key)
        if found is not None:
            return found
        lo = self._quantify(kind, vs, self._lo[f])
        hi = self._quantify(kind, vs, self._hi[f])
        if var in vs:
            op = "or" if kind == "exists" else "and"
            r = self._apply(op, lo, hi)
        else:
            r = self.node(var, lo, hi)
        self._cache[key] = r
        return r

    def exists(self, variables: Iterable[int], f: int) -> int:
        return self.quantify("exists", variables, f)

    def forall(self, variables: Iterable[int], f: int) -> int:
        return self.quantify("forall", variables, f)

    def and_exists(self, variables: Iterable[int], f: int, g: int) -> int:
        """Fused exists(variables, f and g); avoids the intermediate product."""
        vs = frozenset(variables)
        return self._and_exists(vs, f, g)

    def _and_exists(self, vs: frozenset[int], f: int, g: int) -> int:
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE and g == TRUE:
            return TRUE
        if f == TRUE:
            return self._quantify("exists", vs, g)
        if g == TRUE:
            return self._quantify("exists", vs, f)
        if g < f:
            f, g = g, f
        key = ("ae", vs, f, g)
        found = self._cache.get(key)
        if found is not None:
            return found
        var = min(self._var[f], self._var[g])
        f0, f1 = self.cofactors(f, var)
        g0, g1 = self.cofactors(g, var)
        lo = self._and_exists(vs, f0, g0)
        if var in vs:
            if lo == TRUE:
                r = TRUE
            else:
                r = self._apply("or", lo, self._and_exists(vs, f1, g1))
        else:
            r = self.node(var, lo, self._and_exists(vs, f1, g1))
        self._cache[key] = r
        return r

    # -- structure helpers --------------------------------------------------

    def cube(self, literals: dict[int, bool]) -> int:
        """Conjunction of literals, built bottom-up without apply calls."""
        r = TRUE
        for var in sorted(literals, reverse=True):
            if literals[var]:
                r = self.node(var, FALSE, r)
            else:
                r = self.node(var, r, FALSE)
        return r

    def conjoin(self, fs: Iterable[int]) -> int:
        return self._balanced("and", list(fs), TRUE)

    def disjoin(self, fs: Iterable[int]) -> int:
        return self._balanced("or", list(fs), FALSE)

    def _balanced(self, op: str, items: list[int], unit: int) -> int:
        if not items:
            return unit
        while len(items) > 1:
            items = [
                self._apply(op, items[k], items[k + 1])
                if k + 1 < len(items)
                else items[k]
                for k in range(0, len(items), 2)
            ]
        return items[0]

    def support(self, f: int) -> set[int]:
        seen: set[int] = set()
        out: set[int] = set()
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= TRUE or u in seen:
                continue
            seen.add(u)
            out.add(self._var[u])
            stack.append(self._lo[u])
            stack.append(self._hi[u])
        return out

    # -- model enumeration --------------------------------------------------

    def enumerate_sat(self, f: int, over: Iterable[int]) -> Iterator[tuple[bool, ...]]:
        """All total satisfying assignments over `over`, in lexicographic order.

        `f` must not depend on variables outside `over`; assignments are
        tuples aligned with sorted(over), False explored before True.
        """
        variables = sorted(set(over))
        extra = self.support(f) - set(variables)
        if extra:
            raise ValueError(f"diagram depends on variables outside block: {extra}")
        pos_of = {v: k for k, v in enumerate(variables)}

        def rec(u: int, k: int, acc: list[bool]) -> Iterator[tuple[bool, ...]]:
            if u == FALSE:
                return
            if k == len(variables):
                yield tuple(acc)
                return
            var = variables[k]
            lo, hi = self.cofactors(u, var)
            acc.append(False)
            yield from rec(lo, k + 1, acc)
            acc[-1] = True
            yield from rec(hi, k + 1, acc)
            acc.pop()

        yield from rec(f, 0, [])

    def model_count(self, f: int, over: Iterable[int]) -> int:
        variables = sorted(set(over))
        memo: dict[tuple[int, int], int] = {}

        def rec(u: int, k: int) -> int:
            if u == FALSE:
                return 0
            if k == len(variables):
                return 1 if u == TRUE else 0
            key = (u, k)
            if key in memo:
                return memo[key]
            lo, hi = self.cofactors(u, variables[k])
            r = rec(lo, k + 1) + rec(hi, k + 1)
            memo[key] = r
            return r

        return rec(f, 0)

    def evaluate(self, f: int, assignment: dict[int, bool]) -> bool:
        u = f
        while u > TRUE:
            u = self._hi[u] if assignment.get(self._var[u], False) else self._lo[u]
        return u == TRUE

    def to_dot(self, f: int, names: dict[int, str] | None = None) -> str:
        """DOT text of the diagram rooted at `f`, for debugging."""
        lines = ["digraph dd {", '  0 [label="0", shape=box];', '  1 [label="1", shape=box];']
        seen = set()
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= TRUE or u in seen:
                continue
            seen.add(u)
            v = self._var[u]
            label = names.get(v, f"x{v}") if names else f"x{v}"
            lines.append(f'  {u} [label="{label}"];')
            lines.append(f"  {u} -> {self._lo[u]} [style=dashed];")
            lines.append(f"  {u} -> {self._hi[u]};")
            stack.append(self._lo[u])
            stack.append(self._hi[u])
        lines.append("}")
        return "\n".join(lines) + "\n"
