"""Cubical grid of width r: its 1-skeleton S and the dual (n-2)-skeleton T."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from chains.one import OneChain
from chains.regions import Region, unit_disk
from chains.tolerance import eps_geom
from coarea.cover import domain_bounds
from core.errors import BadSpec


@dataclass(frozen=True, eq=False)
class GridSkeleton:
    r: float
    n: int
    lo: np.ndarray
    hi: np.ndarray
    offset: np.ndarray = field(default=None)

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise BadSpec(f"grid width must lie in (0, 1), got {self.r}")
        if self.n not in (2, 3):
            raise BadSpec(f"grids are built in dimension 2 or 3, got {self.n}")
        if self.offset is None:
            object.__setattr__(self, "offset", np.zeros(self.n))

    @classmethod
    def for_domain(cls, r: float, domain: Optional[Region] = None,
                   offset: Optional[np.ndarray] = None) -> "GridSkeleton":
        domain = domain if domain is not None else unit_disk(2)
        lo, hi = domain_bounds(domain)
        off = np.zeros(domain.dim) if offset is None else np.asarray(offset, dtype=float)
        return cls(float(r), domain.dim, np.asarray(lo, float), np.asarray(hi, float), off)

    @property
    def R(self) -> float:
        return 1.0 / self.r

    @property
    def classes(self) -> List[Optional[int]]:
        """Parallel classes of dual pieces, named by the axis they run along."""
        return [None] if self.n == 2 else list(range(self.n))

    def index_range(self, axis: int) -> range:
        first = math.floor((self.lo[axis] - self.offset[axis]) / self.r)
        last = math.floor((self.hi[axis] - self.offset[axis]) / self.r)
        return range(first, last + 1)

    def cell_of(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.n)
        return np.floor((pts - self.offset) / self.r).astype(np.int64)

    def cell_box(self, index) -> Tuple[np.ndarray, np.ndarray]:
        lo = self.offset + np.asarray(index, dtype=float) * self.r
        return lo, lo + self.r

    def plane(self, axis: int, m: int) -> float:
        return float(self.offset[axis] + m * self.r)

    def grid_coordinate(self, values: np.ndarray, axis: int) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.offset[axis]) / self.r

    def dual_points(self, along: Optional[int]) -> np.ndarray:
        """Dual pieces of one class seen along their direction: planar lattice points."""
        axes = [a for a in range(self.n) if a != along]
        grids = [
            self.offset[a] + (np.arange(self.index_range(a).start - 1, self.index_range(a).stop + 1)
                              + 0.5) * self.r
            for a in axes
        ]
        mesh = np.meshgrid(*grids, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])

    def project(self, points: np.ndarray, along: Optional[int]) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.n)
        if along is None:
            return pts
        return np.delete(pts, along, axis=1)

    def skeleton_mass(self, center=None, radius: float = 1.0) -> float:
        """Length of the grid 1-skeleton inside a ball, summed chord by chord."""
        center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)
        total = 0.0
        for axis in range(self.n):
            others = [a for a in range(self.n) if a != axis]
            coords = []
            for a in others:
                ticks = list(self.index_range(a)) + [self.index_range(a).stop]
                coords.append(self.offset[a] + np.array(ticks) * self.r - center[a])
            mesh = np.meshgrid(*coords, indexing="ij")
            dist2 = sum(m**2 for m in mesh)
            total += float(np.sum(2.0 * np.sqrt(np.maximum(radius**2 - dist2, 0.0))))
        return total

    def edge_constant(self) -> float:
        """E(n) in mass(S inside the unit ball) <= E(n) R^n, in grid units."""
        return self.skeleton_mass() * self.R / self.R**self.n

    def on_skeleton(self, chain: OneChain, tol: Optional[float] = None) -> bool:
        if chain.is_empty:
            return True
        tol = 1e3 * eps_geom() if tol is None else tol
        segs = chain.segments
        grid = (segs - self.offset) / self.r
        on_plane = np.abs(grid - np.round(grid)) <= tol / self.r
        constant = np.abs(segs[:, 0] - segs[:, 1]) <= tol
        fixed = on_plane[:, 0] & on_plane[:, 1] & constant
        return bool(np.all(fixed.sum(axis=1) >= self.n - 1))
