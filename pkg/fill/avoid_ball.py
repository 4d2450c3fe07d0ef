"""Perturbing a localized family in the 3-ball so that it barely meets a boundary cap.

B is the open cap of chordal radius L around the south pole e. At original
vertices the points in B are replaced by e, kept only for odd parity. Every cell
E of the parameter complex gets a radius r_E whose sphere misses the certificate
balls and all vertex supports; inside B_{r_E}(e) the cell moves the points of its
boundary data to e one at a time, along the sphere for boundary points and
straight for interior points. Both paths keep their azimuth, so a meridian tube
chosen per top cell stays empty.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from chains import SOUTH_POLE_3D
from chains.regions import Ball, BoundaryBall, Complement
from chains.tolerance import eps_geom
from chains.zero import ZeroChain
from coarea.admissible import AdmissibleFamily
from coarea.localized import LocalizationReport, check_localized
from cubical.complex import Cell, Vertex
from cubical.family import VertexMap, nearest_original
from cubical.layered import LayeredFamily, Level
from fill.angles import TAU, widest_free_angle, widest_gap
from core.errors import CertMissing, DeltaTooLarge, DimUnsupported, hard_assert

logger = logging.getLogger("Fill")

Certs = Union[Mapping[Cell, AdmissibleFamily], Callable[[Cell], AdmissibleFamily]]

ANGLE_TOL = 1e-9
SUPPORT_TOL = 1e-7
TUBE_DEPTH = 0.5


def azimuth(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    return np.mod(np.arctan2(pts[:, 1], pts[:, 0]), TAU)


def _angular_distance(a: np.ndarray, b: float) -> np.ndarray:
    d = np.abs(np.mod(a - b, TAU))
    return np.minimum(d, TAU - d)


def ball_azimuths(center: np.ndarray, radius: float) -> Tuple[float, float]:
    """Azimuth interval of the vertical half-planes meeting a ball."""
    planar = float(np.linalg.norm(center[:2]))
    if planar <= radius:
        return 0.0, TAU
    half = math.asin(radius / planar)
    theta = float(azimuth(center)[0])
    return theta - half, theta + half


def tube_hits(z: ZeroChain, theta: float, L: float) -> int:
    """Points of z in the tube under the meridian segment at azimuth theta."""
    if z.is_empty:
        return 0
    pts = z.points
    norm = np.linalg.norm(pts, axis=1)
    planar = np.linalg.norm(pts[:, :2], axis=1)
    safe = np.where(norm > 0.0, norm, 1.0)
    height = pts[:, 2] / safe
    inside = (
        (planar > eps_geom())
        & (norm >= 1.0 - TUBE_DEPTH)
        & (height <= 0.0)
        & (height >= -math.cos(L / 2.0))
        & (_angular_distance(azimuth(pts), theta) <= ANGLE_TOL)
    )
    return int(inside.sum())


@dataclass
class AvoidBallReport:
    L: float
    delta: float
    p: int
    Q: int
    pads: List[int]
    radii: Dict[str, float] = field(default_factory=dict)
    meridians: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    vertices: int = 0
    outside_failures: int = 0
    original_failures: int = 0
    mass_failures: int = 0
    tube_failures: int = 0
    max_excess: float = -math.inf
    localization: Optional[LocalizationReport] = None
    rows: List[dict] = field(default_factory=list)

    @property
    def localized_radius(self) -> float:
        return self.L + (self.p + 2) * self.delta

    @property
    def passed(self) -> bool:
        return (self.outside_failures == 0 and self.original_failures == 0
                and self.mass_failures == 0 and self.tube_failures == 0
                and (self.localization is None or self.localization.localized))

    def to_dict(self) -> dict:
        out = {
            "L": self.L,
            "delta": self.delta,
            "p": self.p,
            "Q": self.Q,
            "pads": self.pads,
            "localized_radius": self.localized_radius,
            "radii": self.radii,
            "meridians": {k: {"theta": t, "gap": g} for k, (t, g) in self.meridians.items()},
            "vertices": self.vertices,
            "outside_failures": self.outside_failures,
            "original_failures": self.original_failures,
            "mass_failures": self.mass_failures,
            "tube_failures": self.tube_failures,
            "max_excess": self.max_excess,
            "passed": self.passed,
            "rows": self.rows,
        }
        if self.localization is not None:
            out["localization"] = self.localization.to_dict()
        return out


class AvoidBallFamily(LayeredFamily):
    def __init__(self, F: VertexMap, certs: Certs, delta: float, L: float, substeps: int = 2):
        super().__init__(F.complex.rebased())
        self.F = F
        first = F[self.complex.vertices()[0]]
        if first.dim != 3:
            raise DimUnsupported(f"boundary-ball avoidance needs dimension 3, got {first.dim}")
        if delta >= TAU * math.sin(L + delta):
            raise DeltaTooLarge(f"delta={delta} leaves no meridian at L={L}")
        self.delta = float(delta)
        self.L = float(L)
        self.p = self.complex.dim
        self.substeps = max(int(substeps), 2)
        self.e = np.asarray(SOUTH_POLE_3D, dtype=float)
        self.B = BoundaryBall(self.e, self.L)
        self.top_cells = list(self.complex.maximal_cells())
        lookup = certs if callable(certs) else certs.get
        self.certs: Dict[Cell, AdmissibleFamily] = {}
        for cell in self.top_cells:
            family = lookup(cell)
            if family is None:
                raise CertMissing(f"no certificate for {cell}")
            self.certs[cell] = family
        self.containing: Dict[Cell, List[Cell]] = {}
        for cell in self.top_cells:
            for face in cell.faces():
                self.containing.setdefault(face, []).append(cell)
        self._vertex: Dict[Vertex, ZeroChain] = {
            v: self._vertex_image(F[v]) for v in self.complex.vertices()
        }
        support = [z.points for z in self._vertex.values() if not z.is_empty]
        self.support = np.vstack(support) if support else np.empty((0, 3))
        self.shell: Dict[Cell, float] = {C: self._choose_radius(C, 1) for C in self.top_cells}
        self.radius: Dict[Cell, float] = {}
        for dim in range(1, self.p + 1):
            for cell in self.complex.cells(dim):
                if dim == 1:
                    self.radius[cell] = max(self.shell[C] for C in self.containing[cell])
                else:
                    self.radius[cell] = self._choose_radius(cell, dim)
        self.meridian: Dict[Cell, Tuple[float, float]] = {
            C: self._choose_meridian(C) for C in self.top_cells
        }
        self._cores: Dict[Tuple[Cell, Vertex], ZeroChain] = {}
        self._moves: Dict[Tuple[int, int], tuple] = {}
        r_max = max(self.radius.values(), default=self.L)
        crowd = max((self._in_ball(F[v], r_max).mass for v in self.complex.vertices()), default=0)
        pad = (crowd + self.p + 2) * self.substeps + 2
        self.configure([Level(pad, dim=j) for j in range(1, self.p + 1)])
        logger.info(f"avoid-ball family: p={self.p}, L={self.L}, delta={self.delta}, "
                    f"pad={pad}, Q={self.Q}")

    def _in_ball(self, z: ZeroChain, r: float) -> ZeroChain:
        return z.restrict(Ball(self.e, r))

    def _vertex_image(self, z: ZeroChain) -> ZeroChain:
        inside = z.restrict(self.B)
        out = z + inside
        if inside.mass % 2:
            out = out + ZeroChain([self.e], dim=3)
        return out

    def _balls(self, cells: Sequence[Cell]) -> List[Tuple[np.ndarray, float]]:
        specs = []
        for C in cells:
            specs.extend(self.certs[C].specs())
        return specs

    def _choose_radius(self, cell: Cell, j: int) -> float:
        lo, hi = self.L + j * self.delta, self.L + (j + 1) * self.delta
        forbidden = []
        for c, rho in self._balls(self.containing.get(cell, [cell])):
            d = float(np.linalg.norm(np.asarray(c) - self.e))
            forbidden.append((d - rho, d + rho))
        for d in np.linalg.norm(self.support - self.e, axis=1):
            forbidden.append((d - SUPPORT_TOL, d + SUPPORT_TOL))
        r, width = widest_gap(lo, hi, forbidden)
        if width <= 2 * SUPPORT_TOL:
            raise DeltaTooLarge(f"no sphere around e in [{lo:.4g}, {hi:.4g}] "
                                f"misses the balls of {cell}")
        return r

    def kept_balls(self, C: Cell, r: float) -> List[Tuple[np.ndarray, float]]:
        """Certificate balls of C disjoint from B_r(e)."""
        return [(np.asarray(c), rho) for c, rho in self.certs[C].specs()
                if np.linalg.norm(np.asarray(c) - self.e) >= r + rho]

    def _choose_meridian(self, C: Cell) -> Tuple[float, float]:
        intervals = []
        for c, rho in self.kept_balls(C, self.shell[C]):
            if c[2] - rho > 0.0 or np.linalg.norm(c) + rho < 1.0 - TUBE_DEPTH:
                continue
            intervals.append(ball_azimuths(c, rho))
        if len(self.support):
            off_axis = np.linalg.norm(self.support[:, :2], axis=1) > eps_geom()
            for theta in azimuth(self.support[off_axis]):
                intervals.append((theta - 10 * ANGLE_TOL, theta + 10 * ANGLE_TOL))
        theta, gap = widest_free_angle(intervals)
        if gap <= 20 * ANGLE_TOL:
            raise DeltaTooLarge(f"no free meridian for {C}")
        return theta, gap

    def localization_cert(self, C: Cell) -> AdmissibleFamily:
        r = self.radius.get(C, self.shell[C])
        specs = [(self.e, r)] + self.kept_balls(C, r)
        return AdmissibleFamily.from_specs(specs, self.L + (self.p + 2) * self.delta)

    def vertex_value(self, vertex: Vertex) -> ZeroChain:
        return self._vertex[vertex]

    def core_value(self, cell: Cell, corner: Vertex) -> ZeroChain:
        key = (cell, corner)
        cached = self._cores.get(key)
        if cached is None:
            z = self.F[corner]
            inside = self._in_ball(z, self.radius[cell])
            cached = z + inside
            if inside.mass % 2:
                cached = cached + ZeroChain([self.e], dim=3)
            self._cores[key] = cached
        return cached

    def ring_value(self, cell: Cell, xi, depth: int, corner: Vertex, level: int) -> ZeroChain:
        outer = self.boundary_value(cell, xi, level)
        target = self.core_value(cell, corner)
        key = (id(outer), id(target))
        entry = self._moves.get(key)
        if entry is None:
            entry = (outer, target, self._snapshots(outer, target, self.radius[cell]))
            self._moves[key] = entry
        snapshots = entry[2]
        return snapshots[min(depth, len(snapshots) - 1)]

    def _path(self, point: np.ndarray, s: float) -> np.ndarray:
        if abs(np.linalg.norm(point) - 1.0) <= 10 * eps_geom():
            omega = math.acos(max(-1.0, min(1.0, float(point @ self.e))))
            if omega <= eps_geom():
                return self.e.copy()
            mixed = math.sin((1 - s) * omega) * point + math.sin(s * omega) * self.e
            return mixed / math.sin(omega)
        return point + s * (self.e - point)

    def _snapshots(self, outer: ZeroChain, target: ZeroChain, r: float) -> List[ZeroChain]:
        """Cancel the points of ``outer`` inside B_r(e) against e one at a time.

        Points already counted (in the cap or interior) travel to e first. Boundary
        points outside the cap travel to e when e is unmarked; otherwise the mark
        at e travels out to them, so at most one extra point is counted at a time.
        """
        inside = self._in_ball(outer, r)
        rest = outer + inside
        pts = inside.points
        at_e = np.linalg.norm(pts - self.e, axis=1) <= eps_geom() if len(pts) else np.zeros(0, bool)
        movers = pts[~at_e]
        marked = bool(at_e.any())
        if len(movers):
            uncounted = (~self.B.contains(movers)) & (np.linalg.norm(movers, axis=1)
                                                      >= 1.0 - 10 * eps_geom())
            movers = np.concatenate([movers[~uncounted], movers[uncounted]])
            uncounted = np.concatenate([np.zeros((~uncounted).sum(), bool),
                                        np.ones(uncounted.sum(), bool)])
        snapshots = [outer]
        for i, point in enumerate(movers):
            waiting = list(movers[i + 1:])
            outward = marked and uncounted[i]
            for step in range(1, self.substeps + 1):
                s = step / self.substeps
                if step == self.substeps:
                    marked = not marked
                    now = waiting + ([self.e] if marked else [])
                elif outward:
                    now = waiting + [point, self._path(point, 1.0 - s)]
                else:
                    now = waiting + [self._path(point, s)] + ([self.e] if marked else [])
                snapshots.append(rest + ZeroChain(now, dim=3))
        snapshots.append(target)
        return snapshots

    def chain_map(self) -> VertexMap:
        return self.as_vertex_map("avoid-ball")


def _interior_mass(z: ZeroChain) -> int:
    if z.is_empty:
        return 0
    return int(np.sum(np.linalg.norm(z.points, axis=1) < 1.0 - 10 * eps_geom()))


def cap_mass(z: ZeroChain, B: BoundaryBall) -> int:
    """mass of z in the open ball plus mass in the cap B."""
    if z.is_empty:
        return 0
    return _interior_mass(z) + int(B.contains(z.points).sum())


def avoid_boundary_ball(F: VertexMap, certs: Certs, L: float, delta: Optional[float] = None,
                        substeps: int = 2, verify: bool = True):
    """Returns (F', report)."""
    if delta is None:
        lookup = certs if callable(certs) else certs.get
        given = [lookup(C) for C in F.complex.maximal_cells()]
        delta = max((g.delta for g in given if g is not None), default=0.0) or L
    family = AvoidBallFamily(F, certs, delta, L, substeps)
    report = AvoidBallReport(
        L=L, delta=delta, p=family.p, Q=family.Q, pads=[level.pad for level in family.levels],
        radii={str(cell.to_dict()): r for cell, r in family.radius.items()},
        meridians={str(C.to_dict()): m for C, m in family.meridian.items()},
    )
    F_prime = family.chain_map()
    if verify:
        verify_avoid_ball(family, F_prime, report)
    return F_prime, report


def verify_avoid_ball(family: AvoidBallFamily, F_prime: VertexMap,
                      report: AvoidBallReport) -> AvoidBallReport:
    Q = family.Q
    refined = F_prime.complex
    far = Complement(Ball(family.e, report.localized_radius))
    off_cap = Complement(family.B)
    base_mass: Dict[Cell, int] = {}
    for v in refined.vertices():
        value = F_prime[v]
        original = family.F[nearest_original(v, Q)]
        report.vertices += 1
        if not value.restrict(far) == original.restrict(far):
            report.outside_failures += 1
        if all(x % Q == 0 for x in v):
            if not value.restrict(off_cap) == original.restrict(off_cap):
                report.original_failures += 1
        cell, _ = refined.carrier(v)
        if cell not in base_mass:
            base_mass[cell] = max(_interior_mass(family.F[x]) for x in cell.vertices())
        mass = cap_mass(value, family.B)
        bound = base_mass[cell] + cell.dim + 1
        excess = mass - bound
        report.rows.append({"x_index": report.vertices - 1, "vertex": list(v), "mass": mass,
                            "bound": bound, "ratio": mass / bound})
        report.max_excess = max(report.max_excess, float(excess))
        if excess > 0:
            report.mass_failures += 1
        for C in family.containing.get(cell, []):
            if tube_hits(value, family.meridian[C][0], family.L):
                report.tube_failures += 1
                break

    def cert(cell: Cell) -> AdmissibleFamily:
        return family.localization_cert(Cell(tuple(a // Q for a in cell.anchor), cell.axes))

    report.localization = check_localized(F_prime, cert)
    logger.info(f"avoid-ball verified on {report.vertices} vertices: max excess "
                f"{report.max_excess:.0f}, passed={report.passed}")
    hard_assert(report.original_failures == 0, "avoid_original_vertices",
                f"{report.original_failures} original vertices changed outside the cap")
    hard_assert(report.outside_failures == 0, "avoid_outside_ball",
                f"{report.outside_failures} vertices changed outside "
                f"B_{report.localized_radius:.4g}(e)")
    hard_assert(report.mass_failures == 0, "avoid_mass_bound",
                f"{report.mass_failures} vertices exceed mass_C + k + 1")
    hard_assert(report.tube_failures == 0, "meridian_clear",
                f"{report.tube_failures} vertices meet a meridian tube")
    hard_assert(report.localization.localized, "avoid_localized",
                f"{len(report.localization.violations)} localization violations")
    return report
