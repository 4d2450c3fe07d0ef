"""Fillings of localized families whose cycles are small in flat norm."""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from chains.one import OneChain
from chains.operations import components, cone_fill, homothety
from chains.regions import Region, unit_disk
from chains.tolerance import eps_geom
from chains.zero import ZeroChain
from coarea.admissible import AdmissibleFamily, certificate
from coarea.cover import cover_centers
from coarea.localized import LocalizationReport, check_localized
from cubical.complex import Cell, Vertex
from cubical.family import VertexMap, nearest_original
from cubical.layered import LayeredFamily, Level
from flat.norm import edge_filling
from localize.constants import (
    cone_constant,
    localization_constant,
    mass_constant,
    mass_exponent,
)
from localize.family import CONE, INDUCTIVE, cone_chain, select_path
from core.errors import NotLocalized, OddParity

logger = logging.getLogger("Localize")

Certs = Union[Mapping[Cell, AdmissibleFamily], Callable[[Cell], AdmissibleFamily]]


def cone_in_balls(z: ZeroChain, cert: AdmissibleFamily) -> OneChain:
    """Sum of cones over z restricted to each ball, apex at the ball center."""
    if z.is_empty:
        return OneChain.empty(z.dim)
    if not cert.balls:
        raise NotLocalized(f"{z.mass} difference points and no certificate balls")
    centers = np.array([c for c, _ in cert.balls])
    radii = np.array([r for _, r in cert.balls])
    dist = np.linalg.norm(z.points[:, None, :] - centers[None, :, :], axis=2)
    inside = dist <= radii[None, :] + eps_geom()
    if not inside.any(axis=1).all():
        raise NotLocalized("difference leaves the certificate balls")
    owner = np.argmax(inside, axis=1)
    total = OneChain.empty(z.dim)
    for i in np.unique(owner):
        pts = z.points[owner == i]
        if len(pts) % 2:
            raise OddParity(f"ball {i} holds an odd part ({len(pts)} points) of the difference")
        total = total + cone_fill(ZeroChain(pts, reduced=True), centers[i])
    return total


@dataclass
class FillReport:
    path: str
    Q: int
    pads: List[int]
    eps: float
    delta: float
    L: int
    N_in: int = 0
    vertices: int = 0
    boundary_failures: int = 0
    max_mass: float = 0.0
    localization: Optional[LocalizationReport] = None

    @property
    def p(self) -> int:
        return len(self.pads)

    @property
    def K(self) -> int:
        return localization_constant(self.N_in, 0, max(self.p, 1))

    @property
    def measured_constant(self) -> float:
        scale = (self.L / self.delta) ** mass_exponent(0, max(self.p, 1)) * self.eps
        return self.max_mass / scale if scale > 0 else 0.0

    @property
    def constant_bound(self) -> float:
        if self.path == CONE:
            return float(cone_constant(self.p))
        return float(mass_constant(0, max(self.p, 1)))

    @property
    def localized_within(self) -> bool:
        if self.localization is None:
            return True
        loc = self.localization
        return (loc.localized and loc.N <= self.K * max(self.N_in, 1)
                and loc.delta_sum <= self.K * self.delta)

    @property
    def passed(self) -> bool:
        return self.boundary_failures == 0 and self.localized_within

    def to_dict(self) -> dict:
        out = {
            "path": self.path,
            "Q": self.Q,
            "pads": self.pads,
            "eps": self.eps,
            "delta": self.delta,
            "L": self.L,
            "N_in": self.N_in,
            "K": self.K,
            "vertices": self.vertices,
            "boundary_failures": self.boundary_failures,
            "max_mass": self.max_mass,
            "measured_constant": self.measured_constant,
            "constant_bound": self.constant_bound,
            "localized_within": self.localized_within,
        }
        if self.localization is not None:
            out["localization"] = self.localization.to_dict()
        return out


class SmallFilling(LayeredFamily):
    """tau on X(Q) with boundary R^Q F: vertex fillings, cones inside the certificate
    balls on cell cores, and transitions through the rings."""

    def __init__(self, F: VertexMap, certs: Certs, delta: float, domain: Optional[Region] = None,
                 cone_steps: int = 4):
        super().__init__(F.complex.rebased())
        self.F = F
        first = F[self.complex.vertices()[0]]
        self.n = first.dim
        self.p = self.complex.dim
        self.path = select_path(self.n, self.p)
        self.domain = domain if domain is not None else unit_disk(self.n)
        self.delta = float(delta)
        self._certs = certs
        self._cert_cache: Dict[Cell, AdmissibleFamily] = {}
        self._cores: Dict[Tuple[Cell, Vertex], OneChain] = {}
        self._transitions: Dict[Tuple[int, int],
                                Tuple[object, object, List[int], List[OneChain]]] = {}
        self._vertex: Dict[Vertex, OneChain] = {}
        for v in self.complex.vertices():
            if F[v].mass % 2:
                raise OddParity(f"F{v} has odd mass {F[v].mass}")
        if self.path == INDUCTIVE:
            self.cells = cover_centers(self.domain, min(self.delta, 0.5))
            pad = self.cells.L
        else:
            self.cells = None
            pad = cone_steps
        self.cone_steps = cone_steps
        self.configure([Level(pad, dim=j) for j in range(1, self.p + 1)])

    @property
    def L(self) -> int:
        return self.cells.L if self.cells is not None else self.cone_steps

    def cert(self, cell: Cell) -> AdmissibleFamily:
        cached = self._cert_cache.get(cell)
        if cached is not None:
            return cached
        owner = cell
        if cell not in set(self.complex.generators):
            owner = next(g for g in self.complex.generators if cell in g.faces())
        lookup = self._certs if callable(self._certs) else self._certs.get
        family = lookup(owner)
        if family is None:
            raise NotLocalized(f"no certificate for {owner}")
        self._cert_cache[cell] = family
        return family

    def vertex_value(self, vertex: Vertex) -> OneChain:
        cached = self._vertex.get(vertex)
        if cached is None:
            cached = edge_filling(self.F[vertex], self.domain).normalized()
            self._vertex[vertex] = cached
        return cached

    def core_value(self, cell: Cell, corner: Vertex) -> OneChain:
        key = (cell, corner)
        cached = self._cores.get(key)
        if cached is None:
            base = cell.anchor
            mu = cone_in_balls(self.F[corner] + self.F[base], self.cert(cell))
            cached = (self.vertex_value(base) + mu).normalized()
            self._cores[key] = cached
        return cached

    def ring_value(self, cell: Cell, xi, depth: int, corner: Vertex, level: int) -> OneChain:
        outer = self.boundary_value(cell, xi, level)
        target = self.core_value(cell, corner)
        return self._transition(outer, target, depth)

    def _transition(self, outer: OneChain, target: OneChain, depth: int) -> OneChain:
        key = (id(outer), id(target))
        entry = self._transitions.get(key)
        if entry is None:
            cycle = (outer + target).normalized()
            if self.path == INDUCTIVE:
                entry = (outer, target) + self._cell_steps(outer, cycle)
            else:
                entry = (outer, target) + self._radial_steps(target, cycle)
            self._transitions[key] = entry
        _, _, marks, values = entry
        return values[bisect.bisect_left(marks, depth)]

    def _cell_steps(self, outer: OneChain, cycle: OneChain) -> Tuple[List[int], List[OneChain]]:
        """Add the cut boundaries of a cone over the cycle, one cell of the cover at a time."""
        values = [outer]
        marks: List[int] = []
        if cycle.is_empty:
            return [self.cells.L], values
        sigma = cone_chain(cycle)
        current = outer
        for index in range(self.cells.L):
            part = sigma.clip(self.cells.cell(index))
            if part.is_empty:
                continue
            marks.append(index)
            current = (current + part.boundary()).normalized()
            values.append(current)
        marks.append(self.cells.L)
        return marks, values

    def _radial_steps(self, target: OneChain, cycle: OneChain) -> Tuple[List[int], List[OneChain]]:
        """Shrink each component of the cycle onto its first endpoint."""
        parts = components(cycle)
        steps = self.cone_steps
        values = []
        for t in range(steps + 1):
            lam = 1.0 - t / steps
            total = target
            for part in parts:
                total = total + homothety(part, part.segments[0][0], lam)
            values.append(total.normalized())
        return list(range(steps + 1)), values

    def certificate(self, cell: Cell) -> AdmissibleFamily:
        verts = cell.vertices()
        first = self.value(verts[0])
        diffs = [(first + self.value(v)).normalized() for v in verts[1:]]
        return certificate(diffs, rho=eps_geom() * 1e3, link=self.delta / 4.0)

    def chain_map(self) -> VertexMap:
        return self.as_vertex_map("small filling")


def fill_small_family(F: VertexMap, certs: Certs, eps: Optional[float] = None,
                      delta: Optional[float] = None, domain: Optional[Region] = None,
                      verify: bool = True, cone_steps: int = 4):
    """Returns (tau, report) with boundary of tau(x) equal to F at the nearest original vertex."""
    maximal = list(F.complex.maximal_cells())
    lookup = certs if callable(certs) else certs.get
    given = [lookup(c) for c in maximal]
    given = [g for g in given if g is not None]
    if delta is None:
        delta = max((g.delta for g in given if g.balls), default=0.5)
    family = SmallFilling(F, certs, delta, domain, cone_steps)
    fills = [family.vertex_value(v) for v in family.complex.vertices()]
    measured_eps = max((f.mass for f in fills), default=0.0)
    report = FillReport(
        path=family.path, Q=family.Q, pads=[level.pad for level in family.levels],
        eps=eps if eps is not None else measured_eps, delta=delta, L=family.L,
        N_in=max((g.count for g in given), default=0),
    )
    tau = family.chain_map()
    if verify:
        verify_filling(family, tau, report)
    logger.info(f"small filling on X({family.Q}): path={report.path}, "
                f"max mass={report.max_mass:.4g}, passed={report.passed}")
    return tau, report


def verify_filling(family: SmallFilling, tau: VertexMap, report: FillReport) -> FillReport:
    Q = family.Q
    for v in tau.complex.vertices():
        chain = tau[v]
        report.vertices += 1
        report.max_mass = max(report.max_mass, chain.mass)
        if not chain.boundary() == family.F[nearest_original(v, Q)]:
            report.boundary_failures += 1
    report.localization = check_localized(tau, family.certificate)
    return report
