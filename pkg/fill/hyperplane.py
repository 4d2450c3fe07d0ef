"""Planes through the origin that miss a family of balls centred on the sphere."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from fill.angles import widest_free_angle
from core.errors import BadSpec, NotFound

logger = logging.getLogger("Fill")

BallSpec = Tuple[Sequence[float], float]

SEARCH_DIRECTIONS = 4000
BISECTION_STEPS = 20


@dataclass
class Hyperplane:
    normal: np.ndarray
    clearance: float

    def distance(self, point) -> float:
        return abs(float(self.normal @ np.asarray(point, dtype=float)))

    def to_dict(self) -> dict:
        return {"normal": self.normal.tolist(), "clearance": self.clearance}


def clearance(normal: np.ndarray, balls: Sequence[BallSpec]) -> float:
    """Smallest gap between this plane and the balls; positive when all are missed."""
    if not balls:
        return math.inf
    centers = np.array([c for c, _ in balls], dtype=float)
    radii = np.array([r for _, r in balls], dtype=float)
    return float(np.min(np.abs(centers @ normal) - radii))


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    phi = math.pi * (1.0 + 5.0**0.5) * i
    rho = np.sqrt(1.0 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _planar(balls: Sequence[BallSpec]) -> np.ndarray:
    forbidden = []
    for c, r in balls:
        c = np.asarray(c, dtype=float)
        norm = float(np.linalg.norm(c))
        if r >= norm:
            raise NotFound(f"ball {c.tolist()} of radius {r} contains the origin")
        theta = math.atan2(c[1], c[0])
        # normals at angle phi with |cos(phi - theta)| <= r / |c| meet the ball
        reach = math.acos(r / norm)
        forbidden.append((theta + reach, theta + math.pi - reach))
    phi, width = widest_free_angle(forbidden, period=math.pi)
    if width <= 0.0:
        raise NotFound(f"every line through the origin meets one of {len(balls)} balls")
    return np.array([math.cos(phi), math.sin(phi)])


def find_avoiding_hyperplane(balls: Sequence[BallSpec], n: Optional[int] = None,
                             rng: Optional[np.random.Generator] = None) -> Hyperplane:
    """Plane through the origin missing every ball; exact for n=2, a direction search for n=3."""
    if not balls:
        if n is None:
            raise BadSpec("dimension is needed when there are no balls")
        return Hyperplane(np.eye(n)[0], math.inf)
    n = len(balls[0][0]) if n is None else n
    if n == 2:
        normal = _planar(balls)
    elif n == 3:
        rng = rng if rng is not None else np.random.default_rng(0)
        random = rng.normal(size=(SEARCH_DIRECTIONS // 4, 3))
        random /= np.linalg.norm(random, axis=1)[:, None]
        candidates = np.vstack([fibonacci_sphere(SEARCH_DIRECTIONS), random])
        centers = np.array([c for c, _ in balls], dtype=float)
        radii = np.array([r for _, r in balls], dtype=float)
        gaps = np.min(np.abs(candidates @ centers.T) - radii[None, :], axis=1)
        best = int(np.argmax(gaps))
        if gaps[best] <= 0.0:
            raise NotFound(f"no direction among {len(candidates)} clears {len(balls)} balls")
        normal = candidates[best]
    else:
        raise BadSpec(f"hyperplane search is built in dimension 2 or 3, got {n}")
    plane = Hyperplane(normal, clearance(normal, balls))
    if plane.clearance <= 0.0:
        raise NotFound(f"best plane still meets a ball (clearance {plane.clearance:.3g})")
    return plane


def random_sphere_points(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    pts = rng.normal(size=(count, n))
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def random_ball_family(n: int, diameter_sum: float, rng: np.random.Generator,
                       max_balls: int = 8) -> List[BallSpec]:
    """Balls centred on the sphere whose diameters add up to ``diameter_sum``."""
    k = int(rng.integers(1, max_balls + 1))
    centers = random_sphere_points(k, n, rng)
    weights = rng.dirichlet(np.ones(k))
    return [(c, 0.5 * diameter_sum * w) for c, w in zip(centers, weights)]


def equator_family(n: int, diameter_sum: float, rng: np.random.Generator,
                   k: int = 6) -> List[BallSpec]:
    """Equal balls spread along a random great circle."""
    frame = np.linalg.qr(rng.normal(size=(n, n)))[0]
    angles = np.linspace(0.0, 2.0 * math.pi, k, endpoint=False) + rng.uniform(0, 2 * math.pi)
    centers = np.cos(angles)[:, None] * frame[:, 0] + np.sin(angles)[:, None] * frame[:, 1]
    return [(c, 0.5 * diameter_sum / k) for c in centers]


def _families(n: int, trials: int, seed: int) -> List[List[Tuple[np.ndarray, float]]]:
    """Unit-budget families; bisection rescales their radii."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        make = equator_family if t % 4 == 0 else random_ball_family
        out.append(make(n, 1.0, rng))
    return out


def estimate_delta_n(n: int, trials: int = 200, seed: int = 0, hi: float = 4.0) -> float:
    """Largest diameter budget for which every sampled family admits an avoiding plane."""
    families = _families(n, trials, seed)
    rng = np.random.default_rng([seed, 1])

    def feasible(budget: float) -> bool:
        for family in families:
            scaled = [(c, r * budget) for c, r in family]
            try:
                find_avoiding_hyperplane(scaled, n, rng=rng)
            except NotFound:
                return False
        return True

    lo = 0.0
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    logger.info(f"estimated hyperplane budget in dimension {n}: {lo:.4g} over {trials} families")
    return lo


class SphericalPolygon:
    """Convex polygon on the unit 2-sphere, given by vertices in cyclic order."""

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) < 3:
            raise BadSpec("a spherical polygon needs at least three points of the 2-sphere")
        self.vertices = verts / np.linalg.norm(verts, axis=1)[:, None]
        center = self.vertices.sum(axis=0)
        if np.linalg.norm(center) <= 1e-12:
            raise BadSpec("spherical polygon is not inside an open hemisphere")
        self.center = center / np.linalg.norm(center)
        first = float(np.linalg.det(np.stack([self.vertices[0], self.vertices[1], self.center])))
        self.orientation = 1.0 if first >= 0.0 else -1.0

    def edges(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        k = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]

    def contains(self, point) -> bool:
        x = np.asarray(point, dtype=float)
        for a, b in self.edges():
            if self.orientation * float(np.linalg.det(np.stack([a, b, x]))) < -1e-12:
                return False
        return True

    @staticmethod
    def arc_range(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> Tuple[float, float]:
        """Exact range of x -> u.x over the minor great-circle arc from a to b."""
        omega = math.acos(max(-1.0, min(1.0, float(a @ b))))
        values = [float(u @ a), float(u @ b)]
        if omega > 1e-12:
            w = b - (a @ b) * a
            w /= np.linalg.norm(w)
            A, B = float(u @ a), float(u @ w)
            peak = math.atan2(B, A)
            for phi in (peak, peak + math.pi, peak - math.pi):
                if 0.0 < phi < omega:
                    values.append(A * math.cos(phi) + B * math.sin(phi))
        return min(values), max(values)

    def vertex_range(self, u: np.ndarray) -> Tuple[float, float]:
        values = self.vertices @ u
        return float(values.min()), float(values.max())

    def edge_range(self, u: np.ndarray) -> Tuple[float, float]:
        ranges = [self.arc_range(a, b, u) for a, b in self.edges()]
        return min(r[0] for r in ranges), max(r[1] for r in ranges)

    def region_range(self, u: np.ndarray) -> Tuple[float, float]:
        lo, hi = self.edge_range(u)
        unit = u / np.linalg.norm(u)
        if self.contains(unit):
            hi = float(np.linalg.norm(u))
        if self.contains(-unit):
            lo = -float(np.linalg.norm(u))
        return lo, hi


def cuts(value_range: Tuple[float, float], tol: float = 1e-12) -> bool:
    lo, hi = value_range
    return lo < -tol and hi > tol


def skeleton_cut_holds(polygon: SphericalPolygon, normal) -> bool:
    """A plane through the origin cutting the polygon cuts its edges and its vertices too."""
    u = np.asarray(normal, dtype=float)
    if not cuts(polygon.region_range(u)):
        return True
    return cuts(polygon.edge_range(u)) and cuts(polygon.vertex_range(u))


def random_spherical_polygon(rng: np.random.Generator, max_vertices: int = 8) -> SphericalPolygon:
    """Points in cyclic order on a small circle, which form a convex spherical polygon."""
    k = int(rng.integers(3, max_vertices + 1))
    center = random_sphere_points(1, 3, rng)[0]
    radius = rng.uniform(0.05, 1.2)
    frame = np.linalg.qr(np.column_stack([center, rng.normal(size=(3, 2))]))[0]
    e1, e2 = frame[:, 1], frame[:, 2]
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, k))
    pts = [math.cos(radius) * center + math.sin(radius) * (math.cos(a) * e1 + math.sin(a) * e2)
           for a in angles]
    return SphericalPolygon(pts)
