"""Sparse cubical complexes: subcomplexes of I^d(q) with lazy refinement."""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

from core.errors import BadSpec

Vertex = Tuple[int, ...]


class Cell(NamedTuple):
    anchor: Tuple[int, ...]
    axes: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.axes)

    def vertices(self) -> List[Vertex]:
        out = []
        for bits in itertools.product((0, 1), repeat=len(self.axes)):
            v = list(self.anchor)
            for axis, bit in zip(self.axes, bits):
                v[axis] += bit
            out.append(tuple(v))
        return out

    @property
    def first_vertex(self) -> Vertex:
        return self.anchor

    def corner(self, bits: Sequence[bool]) -> Vertex:
        v = list(self.anchor)
        for axis, bit in zip(self.axes, bits):
            v[axis] += int(bit)
        return tuple(v)

    def faces(self) -> List["Cell"]:
        out = []
        for keep in itertools.product((True, False), repeat=len(self.axes)):
            free = tuple(a for a, k in zip(self.axes, keep) if k)
            fixed = [a for a, k in zip(self.axes, keep) if not k]
            for bits in itertools.product((0, 1), repeat=len(fixed)):
                anchor = list(self.anchor)
                for axis, bit in zip(fixed, bits):
                    anchor[axis] += bit
                out.append(Cell(tuple(anchor), free))
        return out

    def facets(self) -> List["Cell"]:
        return [f for f in self.faces() if f.dim == self.dim - 1]

    def to_dict(self) -> dict:
        return {"anchor": list(self.anchor), "axes": list(self.axes)}


def face_closure(cells: Iterable[Cell]) -> List[Cell]:
    closed = set()
    for cell in cells:
        closed.update(cell.faces())
    return sorted(closed, key=lambda c: (c.dim, c.anchor, c.axes))


class CubicalComplex:
    """Complex stored as maximal generator cells at a base level plus a refinement factor.

    Cells and vertices live at level ``q = base_q * factor``; nothing is expanded
    until asked for.
    """

    def __init__(self, d: int, q: int, generators: Iterable[Cell], factor: int = 1):
        gens = [Cell(tuple(g.anchor), tuple(sorted(g.axes))) for g in generators]
        if factor < 1 or factor % 2 == 0:
            raise BadSpec(f"refinement factor must be odd and >= 1, got {factor}")
        self.d = d
        self.base_q = q
        self.factor = factor
        closure = face_closure(gens)
        self._base = closure
        self._base_set = frozenset(closure)
        covered = set()
        for cell in closure:
            if cell.dim > 0:
                covered.update(f for f in cell.faces() if f != cell)
        self.generators = tuple(c for c in closure if c not in covered)

    @classmethod
    def grid(cls, d: int, q: int, j: int | None = None) -> "CubicalComplex":
        """All j-cells of I^d(q) (j defaults to d)."""
        j = d if j is None else j
        gens = []
        for axes in itertools.combinations(range(d), j):
            ranges = [range(q) if i in axes else range(q + 1) for i in range(d)]
            for anchor in itertools.product(*ranges):
                gens.append(Cell(anchor, axes))
        return cls(d, q, gens)

    @classmethod
    def unit_cell(cls, j: int) -> "CubicalComplex":
        return cls(j, 1, [Cell((0,) * j, tuple(range(j)))])

    @property
    def q(self) -> int:
        return self.base_q * self.factor

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.generators), default=0)

    def __repr__(self) -> str:
        return f"CubicalComplex(d={self.d}, q={self.q}, generators={len(self.generators)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CubicalComplex):
            return NotImplemented
        return set(self.cells()) == set(other.cells()) and self.q == other.q

    __hash__ = None

    def base_cells(self, dim: int | None = None) -> List[Cell]:
        return [c for c in self._base if dim is None or c.dim == dim]

    def has_base_cell(self, cell: Cell) -> bool:
        return cell in self._base_set

    def refine(self, q_prime: int) -> "CubicalComplex":
        if q_prime < 1 or q_prime % 2 == 0:
            raise BadSpec(f"refinement must be odd and >= 1, got {q_prime}")
        return CubicalComplex(self.d, self.base_q, self.generators, self.factor * q_prime)

    def rebased(self) -> "CubicalComplex":
        """The same complex with its current cells as base cells."""
        if self.factor == 1:
            return self
        return CubicalComplex(self.d, self.q, list(self.maximal_cells()))

    def skeleton(self, j: int) -> "CubicalComplex":
        """Refinement of the base j-skeleton, kept at the current factor."""
        gens = [c for c in self._base if c.dim <= j]
        return CubicalComplex(self.d, self.base_q, gens, self.factor)

    def _carried(self, base: Cell, f: int) -> Iterator[Cell]:
        for sub in itertools.chain.from_iterable(
            itertools.combinations(base.axes, k) for k in range(base.dim + 1)
        ):
            ranges = []
            for i in range(self.d):
                start = base.anchor[i] * f
                if i in sub:
                    ranges.append(range(start, start + f))
                elif i in base.axes:
                    ranges.append(range(start + 1, start + f))
                else:
                    ranges.append(range(start, start + 1))
            for anchor in itertools.product(*ranges):
                yield Cell(anchor, sub)

    def cells(self, dim: int | None = None) -> Iterator[Cell]:
        for base in self._base:
            for cell in self._carried(base, self.factor):
                if dim is None or cell.dim == dim:
                    yield cell

    def vertices(self) -> List[Vertex]:
        return sorted(c.anchor for c in self.cells(0))

    def maximal_cells(self) -> Iterator[Cell]:
        f = self.factor
        for gen in self.generators:
            ranges = [
                range(gen.anchor[i] * f, gen.anchor[i] * f + (f if i in gen.axes else 1))
                for i in range(self.d)
            ]
            for anchor in itertools.product(*ranges):
                yield Cell(anchor, gen.axes)

    def count(self, dim: int | None = None) -> int:
        return sum(1 for _ in self.cells(dim))

    def carrier(self, vertex: Vertex) -> Tuple[Cell, Tuple[int, ...]]:
        """Smallest base cell containing a vertex, with local coordinates in [0, factor]."""
        f = self.factor
        anchor, axes, local = [], [], []
        for i, v in enumerate(vertex):
            w, rem = divmod(v, f)
            anchor.append(w)
            if rem:
                axes.append(i)
                local.append(rem)
        cell = Cell(tuple(anchor), tuple(axes))
        if cell not in self._base_set:
            raise KeyError(f"vertex {vertex} is not in {self!r}")
        return cell, tuple(local)

    def point(self, vertex: Vertex) -> Tuple[float, ...]:
        return tuple(v / self.q for v in vertex)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "cells": [c.to_dict() for c in self.maximal_cells()],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CubicalComplex":
        try:
            cells = [Cell(tuple(c["anchor"]), tuple(c["axes"])) for c in data["cells"]]
            return cls(int(data["d"]), int(data["q"]), cells)
        except (KeyError, TypeError, ValueError) as e:
            raise BadSpec(f"malformed complex JSON: {e}") from e
