"""Apex points whose pencil of lines meets the dual skeleton transversally.

Lines through P meet at most one dual piece of each parallel class when P avoids
every plane spanned by two parallel pieces. Seen along a class direction the
pieces are lattice points, so the condition becomes an angle gap between lattice
points seen from the projected apex, which also yields the neighbourhood width.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from chains.regions import BoundaryBall, Region, unit_disk
from coarea.cover import sample_domain
from fill.skeleton import GridSkeleton
from core.errors import ExhaustedSamples

logger = logging.getLogger("Fill")

WINDOW = 8


@dataclass
class GenericPoint:
    P: np.ndarray
    ball: Optional[BoundaryBall]
    margin: float
    samples: int = 0
    max_hits: int = 0
    max_diameter: float = 0.0

    def to_dict(self) -> dict:
        return {
            "P": self.P.tolist(),
            "margin": self.margin,
            "samples": self.samples,
            "max_hits": self.max_hits,
            "max_diameter": self.max_diameter,
        }


def _class_margin(apex: np.ndarray, points: np.ndarray) -> float:
    rel = points - apex
    dist = np.linalg.norm(rel, axis=1)
    nearest = float(dist.min()) if len(dist) else math.inf
    if len(points) < 2 or nearest <= 0.0:
        return nearest
    angle = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), math.pi)
    order = np.argsort(angle)
    angle, dist = angle[order], dist[order]
    best = math.inf
    count = len(angle)
    for shift in range(1, min(WINDOW, count - 1) + 1):
        other = np.roll(np.arange(count), -shift)
        gap = np.abs(angle[other] - angle)
        gap = np.minimum(gap, math.pi - gap)
        d1, d2 = dist, dist[other]
        best = min(best, float(np.min(d1 * d2 * np.sin(gap) / (d1 + d2))))
    return min(best, nearest)


def apex_margin(grid: GridSkeleton, P: np.ndarray, reach: Optional[float] = None) -> float:
    """Largest width such that no line through P is that close to two parallel pieces."""
    if reach is None:
        reach = float(np.linalg.norm(grid.hi - grid.lo)) / 2.0
    margin = math.inf
    for along in grid.classes:
        pts = grid.dual_points(along)
        center = grid.project((grid.lo + grid.hi) / 2.0, along)[0]
        pts = pts[np.linalg.norm(pts - center, axis=1) <= reach + grid.r]
        margin = min(margin, _class_margin(grid.project(P, along)[0], pts))
    return margin


def verify_rays(grid: GridSkeleton, P: np.ndarray, margin: float, rng: np.random.Generator,
                count: int = 1000, domain: Optional[Region] = None) -> tuple:
    """Count dual neighbourhoods met by random lines through P.

    Returns (max pieces met by one line, max pieces of one class met by one line,
    max chord diameter in cell units).
    """
    domain = domain if domain is not None else unit_disk(grid.n)
    targets = sample_domain(domain, count, rng)
    per_line = np.zeros(len(targets), dtype=int)
    worst_class, worst_diam = 0, 0.0
    for along in grid.classes:
        pts = grid.dual_points(along)
        apex = grid.project(P, along)[0]
        ends = grid.project(targets, along)
        direction = ends - apex
        planar = np.linalg.norm(direction, axis=1)
        full = np.linalg.norm(targets - P, axis=1)
        usable = planar > 1e-12
        unit = direction[usable] / planar[usable, None]
        rel = pts[None, :, :] - apex[None, None, :]
        dist = np.abs(rel[:, :, 0] * unit[:, None, 1] - rel[:, :, 1] * unit[:, None, 0])
        inside = dist < margin
        hits = inside.sum(axis=1)
        per_line[usable] += hits
        if len(hits):
            worst_class = max(worst_class, int(hits.max()))
        chord = 2.0 * np.sqrt(np.maximum(margin**2 - dist**2, 0.0))
        scale = (full[usable] / planar[usable])[:, None]
        diam = np.where(inside, chord * scale, 0.0)
        if diam.size:
            worst_diam = max(worst_diam, float(diam.max()) / grid.r)
    return int(per_line.max(initial=0)), worst_class, worst_diam


def _candidate(ball: BoundaryBall, rng: np.random.Generator) -> np.ndarray:
    n = ball.dim
    L = ball.angular_radius
    far = 100.0 if L >= math.pi / 2 else 1.0 / math.cos(L)
    d = rng.uniform(1.0 + 1e-3 * (far - 1.0), far)
    slack = (L if L < math.pi / 2 else math.pi / 2) - math.acos(1.0 / d)
    tilt = rng.uniform(0.0, 0.9 * max(slack, 0.0))
    direction = rng.normal(size=n)
    direction -= (direction @ ball.center) * ball.center
    norm = np.linalg.norm(direction)
    if norm < 1e-12 or tilt == 0.0:
        return d * ball.center
    tangent = direction / norm
    return d * (math.cos(tilt) * ball.center + math.sin(tilt) * tangent)


def pick_generic_point(grid: GridSkeleton, B: BoundaryBall,
                       rng: Optional[np.random.Generator] = None, seed: int = 0,
                       max_samples: int = 1000, rays: int = 1000) -> GenericPoint:
    rng = rng if rng is not None else np.random.default_rng(seed)
    limit = math.comb(grid.n, 2)
    for sample in range(1, max_samples + 1):
        P = _candidate(B, rng)
        margin = 0.45 * apex_margin(grid, P, reach=1.0)
        if not margin > 1e-12:
            continue
        hits, per_class, diam = verify_rays(grid, P, margin, rng, rays)
        if hits > limit or per_class > 1 or diam >= 1.0:
            logger.warning(f"apex {P.tolist()} rejected: {hits} pieces, diameter {diam:.3g}")
            continue
        logger.info(f"generic point after {sample} samples: margin={margin:.3g}")
        return GenericPoint(P, B, margin, sample, hits, diam)
    raise ExhaustedSamples(f"no generic point in {max_samples} samples for r={grid.r}")


def pick_apex(grid: GridSkeleton, domain: Region, center: np.ndarray, reach: float,
              rng: np.random.Generator, max_samples: int = 200) -> GenericPoint:
    """Generic apex at distance 2 * reach from ``center`` for a bounded convex domain."""
    for sample in range(1, max_samples + 1):
        u = rng.normal(size=grid.n)
        P = center + 2.0 * reach * u / np.linalg.norm(u)
        if np.any(domain.contains(P)):
            continue
        margin = 0.45 * apex_margin(grid, P)
        if margin > 1e-12:
            return GenericPoint(P, None, margin, sample)
    raise ExhaustedSamples(f"no generic apex in {max_samples} samples")
