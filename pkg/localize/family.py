"""Localized approximation of fine families of 0-cycles.

Edges interpolate through the grid domains of their optimal fillings. On the
plane, a 2-cell C contracts its boundary data to F(v_C) by chopping fillings
P(xi) of b(xi) + F(v_C) along a shared list of cover centers. The fillings are
made consistent at the corners of C by adding the cut boundaries of a cone
2-chain over P_C(v_E) + tau_E + P_C(w_E) one hexagonal cell at a time. Higher
cells, and every cell in space, contract radially instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from chains.one import OneChain
from chains.operations import components, homothety
from chains.regions import Ball, Region, unit_disk
from chains.two import TwoChain
from chains.zero import ZeroChain
from coarea.admissible import AdmissibleFamily, certificate
from coarea.chop import Chopper
from coarea.cover import CoverCenters, cover_centers, domain_bounds, support_points
from coarea.grid import Grid
from coarea.localized import LocalizationReport, check_localized
from coarea.radii import select_radii
from cubical.complex import Cell, Vertex
from cubical.family import VertexMap
from cubical.layered import LayeredFamily, Level, face_of
from flat.fineness import FinenessReport, check_fineness
from flat.norm import edge_filling
from localize.constants import DELTA_MAX, coverage_radius, localization_constant, mass_exponent
from localize.interpolation import END, START, EdgeInterpolation, Sample, interpolate_edge
from core.errors import DeltaTooLarge, DimUnsupported, NotFine, hard_assert

logger = logging.getLogger("Localize")

INDUCTIVE = "inductive"
CONE = "cone"


def select_path(n: int, p: int) -> str:
    if n == 2 and p <= 2:
        return INDUCTIVE
    if p <= 3:
        return CONE
    raise DimUnsupported(f"parameter dimension {p} in ambient dimension {n}")


def domain_center(domain: Region) -> np.ndarray:
    if isinstance(domain, Ball):
        return domain.center
    lo, hi = domain_bounds(domain)
    return (lo + hi) / 2.0


def cone_chain(cycle: OneChain) -> TwoChain:
    """Cone 2-chain over each connected component, apex at its first endpoint."""
    sigma = TwoChain()
    for part in components(cycle):
        sigma = sigma + TwoChain.cone(part, part.segments[0][0])
    return sigma


@dataclass
class InterpolationState:
    path: str
    edges: Dict[Cell, EdgeInterpolation] = field(default_factory=dict)
    fillings: Dict[Cell, Dict[Vertex, OneChain]] = field(default_factory=dict)
    sigma: Dict[Tuple[Cell, Cell], List[OneChain]] = field(default_factory=dict)
    active: Dict[Cell, List[int]] = field(default_factory=dict)
    cone_steps: int = 0

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "edges": len(self.edges),
            "edge_steps": max((e.steps for e in self.edges.values()), default=0),
            "sigma_cells": max((len(s) for s in self.sigma.values()), default=0),
            "active": max((len(a) for a in self.active.values()), default=0),
            "cone_steps": self.cone_steps,
        }


@dataclass
class LocalizeReport:
    path: str
    eps: float
    delta: float
    r: float
    L: int
    Q: int
    pads: List[int]
    N_bound: int = 0
    max_mass_in: int = 0
    max_mass_out: int = 0
    vertices: int = 0
    b1_failures: int = 0
    b2_failures: int = 0
    originals_kept: bool = True
    localization: Optional[LocalizationReport] = None
    fineness: Optional[FinenessReport] = None
    state: Optional[InterpolationState] = None

    @property
    def slack(self) -> int:
        return max(self.max_mass_out - self.max_mass_in, 0)

    def measured_constant(self, p: int) -> float:
        scale = (self.L / self.delta) ** mass_exponent(0, p) * self.eps
        return self.slack / scale if scale > 0 else 0.0

    @property
    def passed(self) -> bool:
        ok = self.b1_failures == 0 and self.b2_failures == 0 and self.originals_kept
        if self.localization is None:
            return ok
        return ok and self.localization.within(self.N_bound, self.delta)

    def to_dict(self) -> dict:
        out = {
            "path": self.path,
            "eps": self.eps,
            "delta": self.delta,
            "r": self.r,
            "L": self.L,
            "Q": self.Q,
            "pads": self.pads,
            "N_bound": self.N_bound,
            "vertices": self.vertices,
            "max_mass_in": self.max_mass_in,
            "max_mass_out": self.max_mass_out,
            "slack": self.slack,
            "b1_failures": self.b1_failures,
            "b2_failures": self.b2_failures,
            "originals_kept": self.originals_kept,
        }
        if self.localization is not None:
            out["localization"] = self.localization.to_dict()
        if self.fineness is not None:
            out["fineness"] = self.fineness.to_dict()
        if self.state is not None:
            out["state"] = self.state.to_dict()
        return out


class LocalizedFamily(LayeredFamily):
    def __init__(self, F: VertexMap, delta: float, domain: Optional[Region] = None, K: int = 1,
                 cone_steps: Optional[int] = None):
        super().__init__(F.complex)
        first = F[self.complex.vertices()[0]]
        self.F = F
        self.n = first.dim
        self.p = self.complex.dim
        self.delta = float(delta)
        self.domain = domain if domain is not None else unit_disk(self.n)
        self.state = InterpolationState(select_path(self.n, self.p))
        self.r = coverage_radius(self.delta, self.p)
        self._taus = self._edge_fillings()
        self.cover: CoverCenters = self._cover()
        self.chopper = Chopper(self.cover, K)
        self.K = K
        self.center = domain_center(self.domain)
        self._pstar: Dict[Tuple[Cell, Cell, int], OneChain] = {}
        self._prefixes: Dict[Tuple[Cell, Cell, int], List[OneChain]] = {}
        self.max_mass_in = max(F[v].mass for v in self.complex.vertices())
        logger.info(f"localizing {self.complex!r}: path={self.state.path}, r={self.r:.4g}, "
                    f"L={self.cover.L}")
        self._build_edges()
        inductive = self.state.path == INDUCTIVE
        levels: List[Level] = []
        if self.p >= 2 and inductive:
            self._build_sigma()
        if self.p >= 1:
            levels.append(Level(max(self._edge_pad(), 1), dim=1))
        if self.p >= 2 and inductive:
            # edge positions are needed before the active lists can be collected
            self.configure(levels + [Level(1, dim=2)])
            levels.append(Level(max(self._build_active(), 1), dim=2))
        elif self.p >= 2:
            half = cone_steps or max(4, math.ceil(2.0 * max(self.max_mass_in, 1) / self.delta))
            self.state.cone_steps = half
            levels += [Level(2 * half, dim=j) for j in range(2, self.p + 1)]
        self.configure(levels)

    def _edge_fillings(self) -> Dict[Cell, OneChain]:
        taus = {}
        for E in self.complex.base_cells(1):
            v, w = E.anchor, E.corner((1,))
            taus[E] = edge_filling(self.F[v] + self.F[w], self.domain)
        return taus

    def _cover(self) -> CoverCenters:
        if self.state.path == INDUCTIVE:
            return cover_centers(self.domain, self.r)
        # the radial path chops along the edge fillings only
        chains = [self.F[v] for v in self.complex.vertices()] + list(self._taus.values())
        return cover_centers(self.domain, self.r, near=support_points(chains, self.r))

    def _build_edges(self) -> None:
        for E in self.complex.base_cells(1):
            v, w = E.anchor, E.corner((1,))
            Fv, Fw = self.F[v], self.F[w]
            tau = self._taus[E]
            avoid = np.vstack([Fv.points, Fw.points]) if (Fv.mass or Fw.mass) else None
            radii = select_radii(self.cover, [tau], self.K, avoid=avoid)
            grid = Grid.single(self.cover.points, radii)
            self.state.edges[E] = interpolate_edge(Fv, Fw, tau, grid, self.r)

    def _edge_pad(self) -> int:
        steps = max((e.steps for e in self.state.edges.values()), default=0)
        sigma = max((len(s) for s in self.state.sigma.values()), default=0)
        return max(steps, math.ceil(sigma / 2))

    def _build_sigma(self) -> None:
        for C in self.complex.base_cells(2):
            vC = C.anchor
            fill = {v: edge_filling(self.F[v] + self.F[vC], self.domain).normalized()
                    for v in C.vertices()}
            self.state.fillings[C] = fill
            for E in C.facets():
                edge = self.state.edges[E]
                cycle = fill[E.anchor] + edge.tau + fill[E.corner((1,))]
                self.state.sigma[(C, E)] = self._sigma_pieces(cycle)

    def _sigma_pieces(self, cycle: OneChain) -> List[OneChain]:
        if cycle.is_empty:
            return []
        sigma = cone_chain(cycle)
        if sigma.is_empty:
            return []
        tris = sigma.triangles
        lo, hi = tris.reshape(-1, 2).min(axis=0), tris.reshape(-1, 2).max(axis=0)
        pts = self.cover.points
        near = np.all((pts >= lo - self.r) & (pts <= hi + self.r), axis=1)
        pieces = []
        for index in np.flatnonzero(near):
            part = sigma.clip(self.cover.cell(int(index)))
            if not part.is_empty:
                pieces.append(part.boundary())
        total = OneChain.empty(2)
        for piece in pieces:
            total = total + piece
        hard_assert(total.geometrically_equal(cycle), "sigma_boundary",
                    "cell pieces of the cone do not add up to its cycle")
        return pieces

    def pstar(self, C: Cell, E: Cell, u: int) -> OneChain:
        """Filling of b(xi) + F(v_C) at position u along the edge E of C."""
        key = (C, E, u)
        cached = self._pstar.get(key)
        if cached is not None:
            return cached
        fill = self.state.fillings[C]
        size = self.sizes[1]
        if u == 0:
            value = fill[E.anchor]
        elif u == size:
            value = fill[E.corner((1,))]
        else:
            edge = self.state.edges[E]
            pad = self.levels[0].pad
            side, depth = (START, u) if u <= pad else (END, size - u)
            pieces = self.state.sigma[(C, E)]
            value = fill[E.anchor] + edge.filling(side, depth)
            for piece in pieces[: (u * len(pieces)) // size]:
                value = value + piece
            value = value.normalized()
        self._pstar[key] = value
        return value

    def _build_active(self) -> int:
        size = self.sizes[1]
        longest = 0
        for C in self.complex.base_cells(2):
            chains = list(self.state.fillings[C].values())
            for E in C.facets():
                chains.extend(self.pstar(C, E, u) for u in range(size + 1))
            self.state.active[C] = self.chopper.active(chains)
            longest = max(longest, len(self.state.active[C]))
        return longest

    def vertex_value(self, vertex: Vertex) -> Sample:
        chain = self.F[vertex]
        return Sample(chain, (chain,), ZeroChain.empty(self.n))

    def core_value(self, cell: Cell, corner: Vertex) -> Sample:
        chain = self.F[cell.anchor]
        return Sample(chain, (chain,), ZeroChain.empty(self.n))

    def ring_value(self, cell: Cell, xi, depth: int, corner: Vertex, level: int) -> Sample:
        if cell.dim == 1:
            side = START if xi[0] == 0 else END
            return self.state.edges[cell].sample(side, depth)
        if self.state.path == INDUCTIVE:
            return self._contract(cell, xi, depth)
        return self._radial(cell, xi, depth, level)

    def _contract(self, C: Cell, xi, depth: int) -> Sample:
        face, local = face_of(C, xi, self.sizes[1])
        key = (C, face, local[0] if local else 0)
        prefixes = self._prefixes.get(key)
        if prefixes is None:
            if face.dim == 0:
                P = self.state.fillings[C][face.anchor]
            else:
                P = self.pstar(C, face, local[0])
            prefixes = self.chopper.prefixes(P, self.state.active[C])
            self._prefixes[key] = prefixes
        rest = prefixes[min(depth, len(prefixes) - 1)].boundary()
        base = self.F[C.anchor]
        return Sample(base + rest, (base,), rest)

    def _radial(self, C: Cell, xi, depth: int, level: int) -> Sample:
        half = self.state.cone_steps
        if depth <= half:
            outer = self.boundary_value(C, xi, level).chain
            chain = homothety(outer, self.center, 1.0 - depth / half)
        else:
            chain = homothety(self.F[C.anchor], self.center, (depth - half) / half)
        return Sample(chain, (), chain)

    def certificate(self, cell: Cell) -> AdmissibleFamily:
        """Admissible family around the differences of F' over one refined cell."""
        verts = cell.vertices()
        first = self.value(verts[0]).chain
        diffs = [first + self.value(v).chain for v in verts[1:]]
        return certificate(diffs, rho=self.r / 8.0, link=4.0 * self.r)

    def chain_map(self) -> VertexMap:
        return self.as_vertex_map("localized").map(lambda s: s.chain, "localized")


def localize_family(F: VertexMap, eps: float, delta: float, domain: Optional[Region] = None,
                    verify: bool = True, fineness: bool = False, K: int = 1,
                    cone_steps: Optional[int] = None):
    """Returns (F', certs, report); F' lives on X(Q) and agrees with F on original vertices."""
    if not 0.0 < delta < DELTA_MAX:
        raise DeltaTooLarge(f"delta={delta} outside (0, {DELTA_MAX})")
    first = F[F.complex.vertices()[0]]
    domain = domain if domain is not None else unit_disk(first.dim)
    select_path(first.dim, F.complex.dim)
    fine = check_fineness(F, eps, domain)
    if not fine.fine:
        raise NotFine(f"family is not {eps}-fine: max flat distance {fine.max_value:.6g}")
    family = LocalizedFamily(F, delta, domain, K=K, cone_steps=cone_steps)
    F_prime = family.chain_map()
    report = LocalizeReport(
        path=family.state.path, eps=eps, delta=delta, r=family.r, L=family.cover.L,
        Q=family.Q, pads=[level.pad for level in family.levels],
        N_bound=localization_constant(1, 0, max(family.p, 1)),
        max_mass_in=family.max_mass_in, state=family.state,
    )
    if verify:
        verify_localized(family, F_prime, report, fineness)
    logger.info(f"localized family on X({family.Q}): path={report.path}, "
                f"slack={report.slack}, passed={report.passed}")
    return F_prime, family.certificate, report


def verify_localized(family: LocalizedFamily, F_prime: VertexMap, report: LocalizeReport,
                     fineness: bool = False) -> LocalizeReport:
    seen = set()
    Q = family.Q
    for v in F_prime.complex.vertices():
        sample = family.value(v)
        report.vertices += 1
        report.max_mass_out = max(report.max_mass_out, sample.chain.mass)
        if all(x % Q == 0 for x in v):
            original = tuple(x // Q for x in v)
            if not sample.chain == family.F[original]:
                report.originals_kept = False
        if id(sample) in seen:
            continue
        seen.add(id(sample))
        if not sample.reconstruct() == sample.chain:
            report.b1_failures += 1
        if sample.weighted_mass > family.max_mass_in:
            report.b2_failures += 1
    report.localization = check_localized(F_prime, family.certificate)
    if fineness:
        report.fineness = check_fineness(F_prime, report.eps, family.domain)
    return report
