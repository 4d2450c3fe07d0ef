"""Splitting a localized family of 1-chains along a convex cell Q.

G_Q is the push of G by the nearest-point projection onto Q. The projection is
piecewise affine on boxes and polygons, so every segment is cut where the active
face changes and the pieces are mapped by their endpoints.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Tuple, Union

import numpy as np

from chains.one import OneChain
from chains.regions import Box, ConvexPolygon, Region
from chains.tolerance import eps_geom
from coarea.admissible import AdmissibleFamily, merge_admissible
from coarea.localized import LocalizationReport, check_localized
from cubical.complex import Cell
from cubical.family import VertexMap
from core.errors import BadSpec, CertMissing

logger = logging.getLogger("Localize")

Certs = Union[Mapping[Cell, AdmissibleFamily], Callable[[Cell], AdmissibleFamily]]


def project_point(Q: Region, point: np.ndarray) -> np.ndarray:
    if isinstance(Q, Box):
        return np.clip(point, Q.lo, Q.hi)
    if isinstance(Q, ConvexPolygon):
        return Q.project(point)
    raise BadSpec(f"no exact projection onto {Q!r}")


def _crossings(Q: Region, a: np.ndarray, b: np.ndarray) -> List[float]:
    """Parameters in (0, 1) where the projection of a + t(b - a) changes pieces."""
    d = b - a
    planes: List[Tuple[np.ndarray, float]] = []
    if isinstance(Q, Box):
        eye = np.eye(len(a))
        for i in range(len(a)):
            planes.append((eye[i], float(Q.lo[i])))
            planes.append((eye[i], float(Q.hi[i])))
    else:
        for normal, offset in zip(Q.normals, Q.offsets):
            planes.append((normal, float(offset)))
        for start, end in Q.edges():
            edge = end - start
            planes.append((edge, float(edge @ start)))
            planes.append((edge, float(edge @ end)))
    out = []
    for normal, offset in planes:
        rate = float(normal @ d)
        if abs(rate) <= 1e-15:
            continue
        t = (offset - float(normal @ a)) / rate
        if 0.0 < t < 1.0:
            out.append(t)
    return sorted(out)


def project_chain(chain: OneChain, Q: Region) -> OneChain:
    if chain.is_empty:
        return chain
    pieces = []
    for a, b in chain.segments:
        ts = [0.0] + _crossings(Q, a, b) + [1.0]
        for lo, hi in zip(ts[:-1], ts[1:]):
            if hi - lo <= 1e-12:
                continue
            pieces.append((project_point(Q, a + lo * (b - a)), project_point(Q, a + hi * (b - a))))
    return OneChain(pieces, dim=chain.dim).normalized()


def project_certificate(cert: AdmissibleFamily, Q: Region) -> AdmissibleFamily:
    # the projection is 1-Lipschitz, so balls map into balls of the same radius
    balls = [(project_point(Q, c), r) for c, r in cert.specs()]
    return merge_admissible(balls, delta=3.0 * cert.delta if cert.delta else None)


def on_boundary(chain: OneChain, Q: Region) -> bool:
    if chain.is_empty:
        return True
    segs = chain.segments
    samples = np.concatenate([segs[:, 0], segs[:, 1], segs.mean(axis=1)])
    return bool(np.all(np.abs(Q.boundary_distance(samples)) <= 10 * eps_geom()))


@dataclass
class SplitReport:
    vertices: int = 0
    outside_q: int = 0
    off_boundary: int = 0
    localization: LocalizationReport = field(default_factory=LocalizationReport)

    @property
    def passed(self) -> bool:
        return self.outside_q == 0 and self.off_boundary == 0 and self.localization.localized

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices,
            "outside_q": self.outside_q,
            "off_boundary": self.off_boundary,
            "localization": self.localization.to_dict(),
            "passed": self.passed,
        }


def split_filling(G: VertexMap, Q: Region, certs: Certs, verify: bool = True):
    """Returns (G_Q, G_Qc, certs of G_Q, report)."""
    if not isinstance(Q, (Box, ConvexPolygon)):
        raise BadSpec(f"split cells must be boxes or polygons, got {Q!r}")
    lookup = certs if callable(certs) else certs.get
    projected: Dict[Cell, AdmissibleFamily] = {}
    for cell in G.complex.maximal_cells():
        cert = lookup(cell)
        if cert is None:
            raise CertMissing(f"no certificate for {cell}")
        projected[cell] = project_certificate(cert, Q)

    def inside(vertex):
        return project_chain(G[vertex], Q)

    G_Q = VertexMap(G.complex, inside, "split inside")
    G_Qc = VertexMap(G.complex, lambda v: (G[v] + G_Q[v]).normalized(), "split outside")
    report = SplitReport()
    if verify:
        for v in G.complex.vertices():
            report.vertices += 1
            part = G_Q[v]
            if not part.is_empty and not np.all(Q.contains(part.endpoints())):
                report.outside_q += 1
            if not on_boundary((G[v].restrict(Q) + part).normalized(), Q):
                report.off_boundary += 1
        report.localization = check_localized(G_Q, projected)
        logger.info(f"split along {Q!r}: {report.vertices} vertices, passed={report.passed}")
    return G_Q, G_Qc, projected, report
