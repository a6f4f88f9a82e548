"""Cells and antichains.

A cell is a set of game locations, stored as a bit set indexed by
location index.  A downward-closed family of cells is represented
canonically by the antichain of its subset-maximal elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Cell:
    """A set of locations of one game, as a fixed-width bit vector."""

    bits: int
    width: int

    @classmethod
    def from_indices(cls, indices: Iterable[int], width: int) -> "Cell":
        bits = 0
        for i in indices:
            if not 0 <= i < width:
                raise ValueError(f"location index {i} out of range 0..{width - 1}")
            bits |= 1 << i
        return cls(bits, width)

    @classmethod
    def empty(cls, width: int) -> "Cell":
        return cls(0, width)

    @classmethod
    def full(cls, width: int) -> "Cell":
        return cls((1 << width) - 1, width)

    def indices(self) -> list[int]:
        return [i for i in range(self.width) if self.bits >> i & 1]

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __and__(self, other: "Cell") -> "Cell":
        self._check(other)
        return Cell(self.bits & other.bits, self.width)

    def __or__(self, other: "Cell") -> "Cell":
        self._check(other)
        return Cell(self.bits | other.bits, self.width)

    def __le__(self, other: "Cell") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: "Cell") -> bool:
        return self <= other and self.bits != other.bits

    def render(self, names: list[str] | tuple[str, ...]) -> str:
        return "{" + ",".join(names[i] for i in self.indices()) + "}"

    def _check(self, other: "Cell") -> None:
        if self.width != other.width:
            raise ValueError(f"cell width mismatch: {self.width} != {other.width}")


def canonical_key(cell: Cell) -> tuple[int, int]:
    """Sort key: descending cardinality, then ascending bit pattern."""
    return (-cell.bits.bit_count(), cell.bits)


@dataclass(frozen=True)
class Antichain:
    """Subset-maximal cells of a downward-closed family, canonically ordered.

    The empty cell is never stored: reachable knowledge cells are nonempty,
    and dropping it keeps "empty antichain" synonymous with "no cell".
    """

    elements: tuple[Cell, ...]
    width: int

    @classmethod
    def of(cls, cells: Iterable[Cell], width: int) -> "Antichain":
        """Reduce arbitrary cells to their subset-maximal, deduplicated core."""
        seen: set[int] = set()
        pool = []
        for c in cells:
            if c.width != width:
                raise ValueError(f"cell width mismatch: {c.width} != {width}")
            if c.bits and c.bits not in seen:
                seen.add(c.bits)
                pool.append(c)
        pool.sort(key=canonical_key)
        kept: list[Cell] = []
        for c in pool:
            if not any(c.bits & ~k.bits == 0 for k in kept):
                kept.append(c)
        return cls(tuple(kept), width)

    @classmethod
    def empty(cls, width: int) -> "Antichain":
        return cls((), width)

    @classmethod
    def top(cls, width: int) -> "Antichain":
        return cls((Cell.full(width),), width)

    def member(self, cell: Cell) -> bool:
        """Is `cell` in the downward closure, i.e. contained in some element?"""
        if cell.width != self.width:
            raise ValueError("cell width mismatch")
        b = cell.bits
        return any(b & ~e.bits == 0 for e in self.elements)

    def union(self, other: "Antichain") -> "Antichain":
        self._check(other)
        return Antichain.of(self.elements + other.elements, self.width)

    def intersect(self, other: "Antichain") -> "Antichain":
        """Meet: pairwise cell intersections, reduced."""
        self._check(other)
        cells = [
            Cell(a.bits & b.bits, self.width)
            for a in self.elements
            for b in other.elements
        ]
        return Antichain.of(cells, self.width)

    def leq(self, other: "Antichain") -> bool:
        """Inclusion of the denoted downward-closed families."""
        self._check(other)
        return all(other.member(e) for e in self.elements)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __bool__(self) -> bool:
        return bool(self.elements)

    def key(self) -> tuple[int, ...]:
        """Hashable canonical identity, for memo tables."""
        return tuple(e.bits for e in self.elements)

    def render(self, names: list[str] | tuple[str, ...]) -> str:
        return " ".join(e.render(names) for e in self.elements)

    def _check(self, other: "Antichain") -> None:
        if self.width != other.width:
            raise ValueError(
                f"antichain width mismatch: {self.width} != {other.width}"
            )


def reduce(cells: Iterable[Cell], width: int) -> Antichain:
    """Module-level alias for the canonical reduction."""
    return Antichain.of(cells, width)
