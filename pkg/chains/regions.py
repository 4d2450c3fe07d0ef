"""Regions of the ambient space: membership and segment clipping.

Every region answers two questions. ``contains`` is a closed membership test with
the geometric tolerance. ``segment_intervals`` returns the sub-intervals of the
parameter range [0, 1] of a segment ``a + t (b - a)`` that lie inside the region.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import List, Sequence, Tuple

import numpy as np

from chains.tolerance import eps_geom
from core.errors import DegenerateCrossing, NonConvexDomain, TangentRay

Interval = Tuple[float, float]


def merge_intervals(intervals: Sequence[Interval], gap: float = 0.0) -> List[Interval]:
    ordered = sorted((lo, hi) for lo, hi in intervals if hi > lo)
    merged: List[Interval] = []
    for lo, hi in ordered:
        if merged and lo <= merged[-1][1] + gap:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def intersect_intervals(a: Sequence[Interval], b: Sequence[Interval]) -> List[Interval]:
    out: List[Interval] = []
    i = j = 0
    a, b = merge_intervals(a), merge_intervals(b)
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def complement_intervals(intervals: Sequence[Interval]) -> List[Interval]:
    out: List[Interval] = []
    cursor = 0.0
    for lo, hi in merge_intervals(intervals):
        if lo > cursor:
            out.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < 1.0:
        out.append((cursor, 1.0))
    return out


class Region(ABC):
    dim: int
    is_convex: bool = False

    @abstractmethod
    def contains(self, points: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        pass

    def contains_point(self, point) -> bool:
        return bool(self.contains(np.asarray(point, dtype=float).reshape(1, -1))[0])

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        raise NonConvexDomain(f"{type(self).__name__} has no boundary distance")

    def boundary_foot(self, point: np.ndarray) -> np.ndarray:
        raise NonConvexDomain(f"{type(self).__name__} has no boundary foot")

    def line_interval(self, origin: np.ndarray, through: np.ndarray) -> Interval:
        raise NonConvexDomain(f"{type(self).__name__} has no line exits")

    def __invert__(self) -> "Region":
        return Complement(self)

    def __and__(self, other: "Region") -> "Region":
        return Intersection([self, other])

    def __or__(self, other: "Region") -> "Region":
        return Union([self, other])


class Ball(Region):
    is_convex = True

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = self.center.shape[0]

    def __repr__(self) -> str:
        return f"Ball({self.center.tolist()}, {self.radius})"

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius + eps_geom()

    def _line_roots(self, a: np.ndarray, d: np.ndarray):
        f = a - self.center
        qa = float(d @ d)
        qb = 2.0 * float(f @ d)
        qc = float(f @ f) - self.radius**2
        disc = qb * qb - 4.0 * qa * qc
        return qa, qb, disc

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        d = b - a
        qa, qb, disc = self._line_roots(a, d)
        if qa <= 0.0 or disc <= 0.0:
            return []
        root = math.sqrt(disc)
        lo = max(0.0, (-qb - root) / (2.0 * qa))
        hi = min(1.0, (-qb + root) / (2.0 * qa))
        return [(lo, hi)] if hi > lo else []

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return self.radius - np.linalg.norm(pts - self.center, axis=1)

    def boundary_foot(self, point: np.ndarray) -> np.ndarray:
        offset = np.asarray(point, dtype=float) - self.center
        norm = np.linalg.norm(offset)
        if norm <= eps_geom():
            offset, norm = np.eye(self.dim)[0], 1.0
        return self.center + self.radius * offset / norm

    def line_interval(self, origin: np.ndarray, through: np.ndarray) -> Interval:
        d = through - origin
        qa, qb, disc = self._line_roots(origin, d)
        # a chord shorter than the tolerance counts as tangent
        if qa <= 0.0 or disc <= (4.0 * qa * eps_geom()) ** 2:
            raise TangentRay(f"line through {origin.tolist()} is tangent to {self!r}")
        root = math.sqrt(disc)
        return (-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)


def unit_disk(n: int) -> Ball:
    return Ball(np.zeros(n), 1.0)


class ConvexPolytope(Region):
    """Intersection of half-spaces ``normal . x <= offset`` with unit normals."""

    is_convex = True

    def __init__(self, normals, offsets):
        normals = np.asarray(normals, dtype=float)
        norms = np.linalg.norm(normals, axis=1)
        self.normals = normals / norms[:, None]
        self.offsets = np.asarray(offsets, dtype=float) / norms
        self.dim = self.normals.shape[1]

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.all(pts @ self.normals.T <= self.offsets + eps_geom(), axis=1)

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        eps = eps_geom()
        lo, hi = 0.0, 1.0
        fa = self.normals @ a - self.offsets
        fb = self.normals @ b - self.offsets
        length = float(np.linalg.norm(b - a))
        for va, vb in zip(fa, fb):
            if abs(va) <= eps and abs(vb) <= eps and length > eps:
                raise DegenerateCrossing(f"segment {a.tolist()}-{b.tolist()} runs along a face")
            if va <= 0.0 and vb <= 0.0:
                continue
            if va > 0.0 and vb > 0.0:
                return []
            t = va / (va - vb)
            if va > 0.0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
        return [(lo, hi)] if hi > lo else []

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.min(self.offsets - pts @ self.normals.T, axis=1)

    def boundary_foot(self, point: np.ndarray) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        slack = self.offsets - self.normals @ p
        k = int(np.argmin(slack))
        return p + slack[k] * self.normals[k]

    def line_interval(self, origin: np.ndarray, through: np.ndarray) -> Interval:
        d = through - origin
        lo, hi = -math.inf, math.inf
        for normal, offset in zip(self.normals, self.offsets):
            rate = float(normal @ d)
            level = float(offset - normal @ origin)
            if abs(rate) <= 1e-15:
                if level < 0.0:
                    raise TangentRay("line misses the polytope")
                continue
            t = level / rate
            if rate > 0.0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
        if hi - lo <= eps_geom() / max(float(np.linalg.norm(d)), eps_geom()):
            raise TangentRay(f"line through {origin.tolist()} only grazes the polytope")
        return lo, hi


class ConvexPolygon(ConvexPolytope):
    """Planar convex polygon given by its vertices."""

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        area = _signed_area(verts)
        if abs(area) <= eps_geom():
            raise NonConvexDomain("degenerate polygon")
        if area < 0:
            verts = verts[::-1]
        self.vertices = verts
        normals, offsets = [], []
        for i in range(len(verts)):
            p, q = verts[i], verts[(i + 1) % len(verts)]
            edge = q - p
            normal = np.array([edge[1], -edge[0]])
            normals.append(normal)
            offsets.append(normal @ p)
        super().__init__(normals, offsets)
        for v in verts:
            if np.any(self.normals @ v - self.offsets > 1e-12):
                raise NonConvexDomain("polygon vertices are not in convex position")

    def __repr__(self) -> str:
        return f"ConvexPolygon({self.vertices.tolist()})"

    @property
    def area(self) -> float:
        return abs(_signed_area(self.vertices))

    def edges(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def project(self, point: np.ndarray) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        if self.contains_point(p):
            return p
        best, best_dist = None, math.inf
        for a, b in self.edges():
            d = b - a
            t = min(1.0, max(0.0, float((p - a) @ d) / float(d @ d)))
            foot = a + t * d
            dist = float(np.linalg.norm(p - foot))
            if dist < best_dist:
                best, best_dist = foot, dist
        return best

    def on_boundary(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        slack = self.offsets - pts @ self.normals.T
        return self.contains(pts) & (np.min(np.abs(slack), axis=1) <= 10 * eps_geom())


def _signed_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class Box(ConvexPolytope):
    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        eye = np.eye(lo.shape[0])
        super().__init__(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))
        self.lo, self.hi = lo, hi


class HalfSpace(ConvexPolytope):
    def __init__(self, normal, offset: float):
        super().__init__(np.asarray(normal, dtype=float).reshape(1, -1), [offset])


class BoundaryBall(Region):
    """Points of the unit sphere within chordal distance ``radius`` of ``center``."""

    def __init__(self, center, radius: float):
        c = np.asarray(center, dtype=float)
        self.center = c / np.linalg.norm(c)
        self.radius = float(radius)
        self.dim = self.center.shape[0]

    def __repr__(self) -> str:
        return f"BoundaryBall({self.center.tolist()}, {self.radius})"

    @property
    def angular_radius(self) -> float:
        return 2.0 * math.asin(min(1.0, self.radius / 2.0))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        on_sphere = np.abs(np.linalg.norm(pts, axis=1) - 1.0) <= 10 * eps_geom()
        return on_sphere & (np.linalg.norm(pts - self.center, axis=1) < self.radius)

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        return []


class BoundaryArc(Region):
    """Open sub-segment of a polygon edge, the planar analogue of a boundary ball."""

    def __init__(self, start, end, center, radius: float):
        self.start = np.asarray(start, dtype=float)
        self.end = np.asarray(end, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = 2

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        d = self.end - self.start
        rel = pts - self.start
        cross = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / np.linalg.norm(d)
        return (cross <= 10 * eps_geom()) & (
            np.linalg.norm(pts - self.center, axis=1) < self.radius
        )

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        return []


class Complement(Region):
    def __init__(self, region: Region):
        self.region = region
        self.dim = region.dim

    def contains(self, points: np.ndarray) -> np.ndarray:
        return ~self.region.contains(points)

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        return complement_intervals(self.region.segment_intervals(a, b))


class Intersection(Region):
    def __init__(self, regions: Sequence[Region]):
        self.regions = list(regions)
        self.dim = self.regions[0].dim

    def contains(self, points: np.ndarray) -> np.ndarray:
        mask = self.regions[0].contains(points)
        for region in self.regions[1:]:
            mask &= region.contains(points)
        return mask

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        out = [(0.0, 1.0)]
        for region in self.regions:
            out = intersect_intervals(out, region.segment_intervals(a, b))
            if not out:
                break
        return out


class Union(Region):
    def __init__(self, regions: Sequence[Region], dim: int | None = None):
        self.regions = list(regions)
        self.dim = dim if dim is not None else self.regions[0].dim

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        mask = np.zeros(len(pts), dtype=bool)
        for region in self.regions:
            mask |= region.contains(pts)
        return mask

    def segment_intervals(self, a: np.ndarray, b: np.ndarray) -> List[Interval]:
        out: List[Interval] = []
        for region in self.regions:
            out.extend(region.segment_intervals(a, b))
        return merge_intervals(out)
