"""Families on X(Q) built skeleton by skeleton with padded rings.

Level m has pad W_m and side Q_m = Q_{m-1} + 2 W_m with Q_0 = 1. A cell is native
to one level. Above its native level a cell only grows padding: its data at u is
its data one level down at clamp(u - W, 0, Q_{m-1}). At its native level a point
u either sits in the ring around the inner box, where it sees the boundary point
xi = clamp(u - W, 0, Q_{m-1}) at depth t = W - d_inf(u - W, box), or strictly
inside the box, where the value depends only on the nearest corner of the cell.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from cubical.complex import Cell, CubicalComplex, Vertex
from cubical.family import VertexMap
from core.errors import BadSpec

Local = Tuple[int, ...]


@dataclass(frozen=True)
class Level:
    pad: int
    dim: Optional[int] = None


def level_sizes(levels: Sequence[Level]) -> List[int]:
    sizes = [1]
    for level in levels:
        sizes.append(sizes[-1] + 2 * level.pad)
    return sizes


class LayeredFamily(ABC):
    def __init__(self, complex: CubicalComplex):
        if complex.factor != 1:
            raise BadSpec("layered families are built over an unrefined complex")
        self.complex = complex
        self.levels: List[Level] = []
        self.sizes: List[int] = [1]
        self._native: Dict[int, int] = {}
        self._memo: Dict[Tuple[Cell, Local, int], object] = {}
        self._refined: Optional[CubicalComplex] = None

    def configure(self, levels: Sequence[Level]) -> None:
        self.levels = list(levels)
        self.sizes = level_sizes(self.levels)
        self._native = {}
        for index, level in enumerate(self.levels, start=1):
            if level.dim is not None:
                if level.dim in self._native:
                    raise BadSpec(f"dimension {level.dim} has two native levels")
                self._native[level.dim] = index
        for j in range(1, self.complex.dim + 1):
            if j not in self._native:
                raise BadSpec(f"no native level for {j}-cells")
        self._memo.clear()

    @property
    def Q(self) -> int:
        return self.sizes[-1]

    @property
    def top(self) -> int:
        return len(self.levels)

    def level_size(self, dim: int) -> int:
        """Side length of a dim-cell once its own level is complete."""
        return self.sizes[self._native[dim]] if dim else 1

    def native_level(self, dim: int) -> int:
        return self._native.get(dim, 0)

    def refined_complex(self) -> CubicalComplex:
        return self.complex.refine(self.Q)

    def value(self, vertex: Vertex):
        if self._refined is None or self._refined.factor != self.Q:
            self._refined = self.complex.refine(self.Q)
        cell, local = self._refined.carrier(vertex)
        return self.cell_value(cell, local, self.top)

    def as_vertex_map(self, provenance: str) -> VertexMap:
        return VertexMap(self.refined_complex(), self.value, provenance)

    def cell_value(self, cell: Cell, u: Local, level: int):
        key = (cell, tuple(u), level)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        value = self._route(cell, tuple(u), level)
        self._memo[key] = value
        return value

    def _route(self, cell: Cell, u: Local, level: int):
        while True:
            if cell.dim == 0:
                return self.vertex_value(cell.anchor)
            size = self.sizes[level]
            if any(x == 0 or x == size for x in u):
                cell, u = face_of(cell, u, size)
                return self.cell_value(cell, u, level)
            native = self._native[cell.dim]
            pad = self.levels[level - 1].pad
            inner = self.sizes[level - 1]
            if level > native:
                u = tuple(min(max(x - pad, 0), inner) for x in u)
                level -= 1
                continue
            if level < native:
                raise RuntimeError(f"{cell} evaluated below its native level")
            shifted = [x - pad for x in u]
            corner = cell.corner([2 * x > size for x in u])
            if all(0 < s < inner for s in shifted):
                return self.core_value(cell, corner)
            xi = tuple(min(max(s, 0), inner) for s in shifted)
            outside = max(max(-s, s - inner, 0) for s in shifted)
            return self.ring_value(cell, xi, pad - outside, corner, level)

    def boundary_value(self, cell: Cell, xi: Local, level: int):
        """Value at a boundary point of ``cell`` one level below ``level``."""
        return self.cell_value(cell, xi, level - 1)

    def boundary_points(self, cell: Cell, level: int) -> List[Local]:
        """Lattice points on the boundary of ``cell`` at the given level."""
        size = self.sizes[level]
        out = []
        for u in _box_points(cell.dim, size):
            if any(x == 0 or x == size for x in u):
                out.append(u)
        return out

    @abstractmethod
    def vertex_value(self, vertex: Vertex):
        pass

    @abstractmethod
    def ring_value(self, cell: Cell, xi: Local, depth: int, corner: Vertex, level: int):
        pass

    @abstractmethod
    def core_value(self, cell: Cell, corner: Vertex):
        pass


def face_of(cell: Cell, u: Local, size: int) -> Tuple[Cell, Local]:
    anchor = list(cell.anchor)
    axes, local = [], []
    for axis, x in zip(cell.axes, u):
        if x == 0:
            continue
        if x == size:
            anchor[axis] += 1
            continue
        axes.append(axis)
        local.append(x)
    return Cell(tuple(anchor), tuple(axes)), tuple(local)


def _box_points(dim: int, size: int) -> List[Local]:
    return list(itertools.product(range(size + 1), repeat=dim))
