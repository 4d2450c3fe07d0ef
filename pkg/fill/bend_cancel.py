"""Bend-and-cancel fillings of families of 0-chains in the unit ball.

Points of F(x) inside the ball, or in the boundary ball B, are joined to the far
exits of their lines through a generic apex. The rays are pushed onto the grid
skeleton, where overlapping pieces cancel mod 2, and the push is undone at both
ends by straight corrections so that the boundary is F(x) plus boundary points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from chains.one import OneChain
from chains.regions import BoundaryBall, unit_disk
from chains.tolerance import eps_geom
from chains.zero import ZeroChain
from cubical.family import VertexMap
from fill.deform import PushMap
from fill.generic_point import GenericPoint, pick_generic_point
from fill.rays import far_exits, ray_fill
from fill.skeleton import GridSkeleton
from core.errors import DegenerateCenter, ExhaustedSamples, hard_assert

logger = logging.getLogger("Fill")


def sphere_tolerance() -> float:
    return 10.0 * eps_geom()


def relevant_part(z: ZeroChain, B: BoundaryBall) -> ZeroChain:
    """F-bar: the points of z in the open ball together with those in B."""
    if z.is_empty:
        return z
    radius = np.linalg.norm(z.points, axis=1)
    keep = (radius < 1.0 - sphere_tolerance()) | B.contains(z.points)
    return ZeroChain(z.points[keep], reduced=True)


def correction(z: ZeroChain, push: PushMap) -> OneChain:
    """Straight segments from each point to its pushed image."""
    if z.is_empty:
        return OneChain.empty(z.dim)
    return OneChain(list(zip(z.points, push.points(z.points))), dim=z.dim)


class BendCancel:
    """Filling operator for one grid, apex and push; values are built on demand."""

    def __init__(self, grid: GridSkeleton, apex: GenericPoint, push: PushMap, B: BoundaryBall):
        self.grid = grid
        self.apex = apex
        self.push = push
        self.B = B

    def __call__(self, z: ZeroChain) -> OneChain:
        part = relevant_part(z, self.B)
        if part.is_empty:
            return OneChain.empty(z.dim)
        exits = far_exits(part, self.apex)
        pushed = self.push.chain(ray_fill(part, self.apex))
        return (pushed + correction(part, self.push) + correction(exits, self.push)).normalized()


@dataclass
class BendCancelReport:
    r: float
    n: int
    apex: List[float]
    attempts: int
    rows: List[dict] = field(default_factory=list)

    @property
    def C(self) -> float:
        return max((row["ratio"] for row in self.rows), default=0.0)

    @property
    def boundary_failures(self) -> int:
        return sum(1 for row in self.rows if not row["boundary_ok"])

    @property
    def boundary_mass_failures(self) -> int:
        return sum(1 for row in self.rows if not row["boundary_mass_ok"])

    @property
    def passed(self) -> bool:
        return self.boundary_failures == 0 and self.boundary_mass_failures == 0

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "apex": self.apex,
            "attempts": self.attempts,
            "C": self.C,
            "boundary_failures": self.boundary_failures,
            "boundary_mass_failures": self.boundary_mass_failures,
            "passed": self.passed,
            "rows": self.rows,
        }


def bend_cancel_fill(F: VertexMap, r: float, B: BoundaryBall, seed: int = 0,
                     jitter: float = 0.05, attempts: int = 5):
    """Returns (G, operator, attempts used).

    Push centers are redrawn with a new seed when a ray meets one of them.
    """
    n = B.dim
    grid = GridSkeleton.for_domain(r, unit_disk(n))
    rng = np.random.default_rng(seed)
    apex = pick_generic_point(grid, B, rng=rng)
    vertices = F.complex.vertices()
    for attempt in range(1, attempts + 1):
        push = PushMap(grid, jitter=jitter, seed=seed + attempt - 1)
        operator = BendCancel(grid, apex, push, B)
        try:
            values = {v: operator(F[v]) for v in vertices}
        except DegenerateCenter as e:
            logger.warning(f"push attempt {attempt} degenerate, redrawing centers: {e}")
            continue
        logger.info(f"bend-and-cancel at r={r}: {len(values)} vertices, {attempt} attempt(s)")
        return VertexMap(F.complex, values, f"bend-cancel({F.provenance})"), operator, attempt
    raise ExhaustedSamples(f"push centers degenerate in {attempts} attempts")


def verify_bend_cancel(F: VertexMap, G: VertexMap, r: float, B: BoundaryBall,
                       apex: GenericPoint, attempts: int = 1) -> BendCancelReport:
    n = B.dim
    report = BendCancelReport(r=r, n=n, apex=apex.P.tolist(), attempts=attempts)
    tol = sphere_tolerance()
    for index, v in enumerate(F.complex.vertices()):
        z = F[v]
        part = relevant_part(z, B)
        chain = G[v]
        rest = chain.boundary() + z
        boundary_ok = rest.is_empty or bool(
            np.all(np.abs(np.linalg.norm(rest.points, axis=1) - 1.0) <= tol))
        k = part.mass
        bound = k * r + r ** (1 - n)
        report.rows.append({
            "x_index": index,
            "vertex": list(v),
            "k": k,
            "mass": chain.mass,
            "bound": bound,
            "ratio": chain.mass / bound,
            "boundary_mass": chain.boundary().mass,
            "boundary_ok": boundary_ok,
            "boundary_mass_ok": chain.boundary().mass <= 2 * k,
        })
    hard_assert(report.boundary_failures == 0, "bend_cancel_boundary",
                f"{report.boundary_failures} vertices leave boundary points off the sphere")
    hard_assert(report.boundary_mass_failures == 0, "bend_cancel_boundary_mass",
                f"{report.boundary_mass_failures} vertices exceed twice the relevant mass")
    logger.info(f"bend-and-cancel verified: C={report.C:.4g} over {len(report.rows)} vertices")
    return report
