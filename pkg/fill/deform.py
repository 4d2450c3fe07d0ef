"""Federer-Fleming deformation of 1-chains onto the grid 1-skeleton.

Each top cell is pushed radially from a jittered center onto its boundary faces.
In dimension 3 every face is then pushed radially from its own center onto its
edges. A radial push maps a straight piece to a polyline whose kinks sit where the
active face changes, so chains are pushed exactly, piece by piece.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from chains.one import OneChain
from chains.regions import Region
from chains.tolerance import eps_geom
from fill.generic_point import GenericPoint
from fill.skeleton import GridSkeleton
from core.errors import BadSpec, DegenerateCenter, hard_assert

logger = logging.getLogger("Fill")

CELL_TAG = 1
FACE_TAG = 2
MIN_GAUGE = 1e-9

Face = Tuple[int, int]


def _zigzag(k: int) -> int:
    return 2 * k if k >= 0 else -2 * k - 1


def _radial(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray,
            c: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray, Face]]:
    """Push the segment ab, inside the box [lo, hi], radially from c onto the box boundary.

    Returns image pieces with the face (axis, side) each lies on; side 1 is the upper face.
    """
    m = len(a)
    d = b - a
    denom = np.concatenate([hi - c, lo - c])
    alpha = np.concatenate([a - c, a - c]) / denom
    beta = np.concatenate([d, d]) / denom
    ts = {0.0, 1.0}
    for j, k in itertools.combinations(range(2 * m), 2):
        rate = beta[j] - beta[k]
        if abs(rate) > 1e-15:
            t = (alpha[k] - alpha[j]) / rate
            if 1e-12 < t < 1.0 - 1e-12:
                ts.add(float(t))
    ts = sorted(ts)
    gauge = [float(np.max(alpha + beta * t)) for t in ts]
    if min(gauge) < MIN_GAUGE:
        raise DegenerateCenter(f"segment {a.tolist()} -> {b.tolist()} passes through push center")
    images = [c + (a + t * d - c) / g for t, g in zip(ts, gauge)]
    pieces = []
    for i in range(len(ts) - 1):
        mid = 0.5 * (ts[i] + ts[i + 1])
        active = int(np.argmax(alpha + beta * mid))
        face = (active % m, 1 if active < m else 0)
        pieces.append((images[i], images[i + 1], face))
    return pieces


def _radial_point(x: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                  c: np.ndarray) -> Tuple[np.ndarray, Face]:
    m = len(x)
    ratios = np.concatenate([x - c, x - c]) / np.concatenate([hi - c, lo - c])
    active = int(np.argmax(ratios))
    gauge = float(ratios[active])
    if gauge < MIN_GAUGE:
        raise DegenerateCenter(f"point {x.tolist()} sits on a push center")
    return c + (x - c) / gauge, (active % m, 1 if active < m else 0)


class PushMap:
    """The deformation Psi for a fixed grid; centers are drawn once per cell and per face."""

    def __init__(self, grid: GridSkeleton, jitter: float = 0.05, seed: int = 0):
        if not 0.0 <= jitter < 0.5:
            raise BadSpec(f"center jitter must lie in [0, 0.5), got {jitter}")
        if seed < 0:
            raise BadSpec(f"push seed must be non-negative, got {seed}")
        self.grid = grid
        self.jitter = jitter
        self.seed = seed
        self._cells: Dict[Tuple[int, ...], np.ndarray] = {}
        self._faces: Dict[Tuple[int, ...], np.ndarray] = {}

    def _offset(self, tag: int, key: Tuple[int, ...], size: int) -> np.ndarray:
        rng = np.random.default_rng([self.seed, tag] + [_zigzag(int(k)) for k in key])
        return self.jitter * self.grid.r * rng.uniform(-1.0, 1.0, size)

    def cell_center(self, index: Tuple[int, ...]) -> np.ndarray:
        center = self._cells.get(index)
        if center is None:
            lo, hi = self.grid.cell_box(index)
            center = (lo + hi) / 2.0 + self._offset(CELL_TAG, index, self.grid.n)
            self._cells[index] = center
        return center

    def face_center(self, axis: int, plane: int, others: Tuple[int, ...]) -> np.ndarray:
        """Center of a square face, in the coordinates of the two axes it spans."""
        key = (axis, plane) + others
        center = self._faces.get(key)
        if center is None:
            lo = (self.grid.offset[self._others(axis)]
                  + np.asarray(others, dtype=float) * self.grid.r)
            center = lo + self.grid.r / 2.0 + self._offset(FACE_TAG, key, 2)
            self._faces[key] = center
        return center

    def _others(self, axis: int) -> List[int]:
        return [i for i in range(self.grid.n) if i != axis]

    def _split(self, a: np.ndarray, b: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
        ga = (a - self.grid.offset) / self.grid.r
        gb = (b - self.grid.offset) / self.grid.r
        ts = {0.0, 1.0}
        for i in range(self.grid.n):
            if abs(gb[i] - ga[i]) <= 1e-15:
                continue
            low, high = sorted((ga[i], gb[i]))
            for plane in range(int(np.ceil(low)), int(np.floor(high)) + 1):
                t = (plane - ga[i]) / (gb[i] - ga[i])
                if 1e-12 < t < 1.0 - 1e-12:
                    ts.add(float(t))
        ts = sorted(ts)
        pts = [a + t * (b - a) for t in ts]
        return list(zip(pts[:-1], pts[1:]))

    def _stage_two(self, ya: np.ndarray, yb: np.ndarray, index: Tuple[int, ...],
                   face: Face) -> List[Tuple[np.ndarray, np.ndarray]]:
        axis, side = face
        plane = index[axis] + side
        others = self._others(axis)
        sub = tuple(index[i] for i in others)
        lo = self.grid.offset[others] + np.asarray(sub, dtype=float) * self.grid.r
        level = self.grid.plane(axis, plane)
        out = []
        for za, zb, (edge_axis, edge_side) in _radial(ya[others], yb[others], lo, lo + self.grid.r,
                                                      self.face_center(axis, plane, sub)):
            pa, pb = np.empty(self.grid.n), np.empty(self.grid.n)
            pa[others], pb[others] = za, zb
            pa[axis] = pb[axis] = level
            fixed = others[edge_axis]
            pa[fixed] = pb[fixed] = self.grid.plane(fixed, index[fixed] + edge_side)
            out.append((pa, pb))
        return out

    def _push_piece(self, a: np.ndarray, b: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
        index = tuple(int(i) for i in self.grid.cell_of((a + b) / 2.0)[0])
        lo, hi = self.grid.cell_box(index)
        out = []
        for ya, yb, face in _radial(a, b, lo, hi, self.cell_center(index)):
            ya, yb = ya.copy(), yb.copy()
            axis, side = face
            ya[axis] = yb[axis] = self.grid.plane(axis, index[axis] + side)
            if self.grid.n == 2:
                out.append((ya, yb))
            else:
                out.extend(self._stage_two(ya, yb, index, face))
        return out

    def point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        index = tuple(int(i) for i in self.grid.cell_of(x)[0])
        lo, hi = self.grid.cell_box(index)
        y, (axis, side) = _radial_point(x, lo, hi, self.cell_center(index))
        plane = index[axis] + side
        y[axis] = self.grid.plane(axis, plane)
        if self.grid.n == 2:
            return y
        others = self._others(axis)
        sub = tuple(index[i] for i in others)
        face_lo = self.grid.offset[others] + np.asarray(sub, dtype=float) * self.grid.r
        z, (edge_axis, edge_side) = _radial_point(y[others], face_lo, face_lo + self.grid.r,
                                                  self.face_center(axis, plane, sub))
        y[others] = z
        fixed = others[edge_axis]
        y[fixed] = self.grid.plane(fixed, index[fixed] + edge_side)
        return y

    def points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, self.grid.n)
        if len(pts) == 0:
            return pts.copy()
        return np.stack([self.point(x) for x in pts])

    def chain(self, c: OneChain) -> OneChain:
        if c.is_empty:
            return c
        pieces = []
        for a, b in c.segments:
            for pa, pb in self._split(a, b):
                pieces.extend(self._push_piece(pa, pb))
        return OneChain(pieces, dim=c.dim).normalized()


@dataclass
class DeformReport:
    n: int
    R: float
    k: int
    mass: float
    displacement: float
    on_skeleton: bool
    through_apex: Optional[bool] = None
    outside_mass: float = 0.0

    @property
    def D(self) -> float:
        """Fitted constant in mass <= D (k + R^n), with mass in cell units."""
        return self.mass * self.R / (self.k + self.R**self.n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "R": self.R,
            "k": self.k,
            "mass": self.mass,
            "D": self.D,
            "displacement": self.displacement,
            "on_skeleton": self.on_skeleton,
            "through_apex": self.through_apex,
            "outside_mass": self.outside_mass,
        }


def lines_through(c: OneChain, P: np.ndarray, tol: Optional[float] = None) -> bool:
    """True when every segment of c lies on a line through P."""
    if c.is_empty:
        return True
    tol = 1e3 * eps_geom() if tol is None else tol
    a, b = c.segments[:, 0], c.segments[:, 1]
    d = (b - a) / np.linalg.norm(b - a, axis=1)[:, None]
    rel = P - a
    off = rel - np.sum(rel * d, axis=1)[:, None] * d
    return bool(np.all(np.linalg.norm(off, axis=1) <= tol * max(1.0, float(np.linalg.norm(P)))))


def reclip(pushed: OneChain, domain: Region) -> OneChain:
    """Clip a pushed chain back to the domain; the boundary it gains lies on the domain boundary."""
    clipped = pushed.restrict(domain)
    gained = clipped.boundary() + pushed.boundary().restrict(domain)
    if not gained.is_empty:
        off = np.abs(domain.boundary_distance(gained.points))
        hard_assert(float(off.max()) <= 10 * eps_geom(), "deform_reclip_boundary",
                    f"re-clipping left boundary {float(off.max()):.3g} off the domain boundary")
    return clipped


def ff_deform(c: OneChain, grid: GridSkeleton, P: Optional[GenericPoint] = None,
              push: Optional[PushMap] = None, seed: int = 0,
              domain: Optional[Region] = None):
    """Push a chain of ray segments onto the grid 1-skeleton.

    Returns (pushed chain, DeformReport). The displacement is measured on the
    segment endpoints in cell widths.
    """
    push = push if push is not None else PushMap(grid, seed=seed)
    out = push.chain(c)
    if domain is not None and not out.is_empty:
        out = reclip(out, domain)
    ends = c.endpoints()
    moved = np.linalg.norm(push.points(ends) - ends, axis=1) if len(ends) else np.zeros(0)
    report = DeformReport(
        n=grid.n,
        R=grid.R,
        k=len(c),
        mass=out.mass,
        displacement=float(moved.max(initial=0.0)) / grid.r,
        on_skeleton=grid.on_skeleton(out),
        through_apex=lines_through(c, P.P) if P is not None else None,
    )
    if domain is not None and not out.is_empty:
        report.outside_mass = max(out.mass - out.restrict(domain).mass, 0.0)
        hard_assert(report.outside_mass <= eps_geom() * len(out), "deform_inside_domain",
                    f"{report.outside_mass:.3g} of the pushed chain lies outside {domain!r}")
    logger.debug(f"deformed {report.k} segments at R={grid.R:.3g}: mass={report.mass:.4g}, "
                 f"D={report.D:.3g}, displacement={report.displacement:.3g}")
    return out, report
