from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from chains.regions import Ball, Box, ConvexPolygon, ConvexPolytope, Region
from chains.tolerance import eps_geom
from chains.zero import ZeroChain

logger = logging.getLogger("Coarea")

CHUNK = 2048


@dataclass(frozen=True)
class CoverCenters:
    points: np.ndarray
    r: float
    spacing: float
    lattice: str

    @property
    def L(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def tree(self) -> cKDTree:
        return cKDTree(self.points)

    def cell(self, index: int) -> ConvexPolytope:
        """Voronoi cell of a center within its lattice."""
        x = self.points[index]
        if self.lattice == "hex":
            angles = np.radians(30.0 + 60.0 * np.arange(6))
            verts = x + self.r * np.column_stack([np.cos(angles), np.sin(angles)])
            return ConvexPolygon(verts)
        half = self.spacing / 2.0
        return Box(x - half, x + half)


def domain_bounds(domain: Region) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(domain, Ball):
        return domain.center - domain.radius, domain.center + domain.radius
    if isinstance(domain, ConvexPolygon):
        return domain.vertices.min(axis=0), domain.vertices.max(axis=0)
    if isinstance(domain, Box):
        return domain.lo, domain.hi
    raise ValueError(f"no bounds for {type(domain).__name__}")


def domain_volume(domain: Region) -> float:
    if isinstance(domain, Ball):
        n = domain.dim
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * domain.radius**n
    if isinstance(domain, ConvexPolygon):
        return domain.area
    if isinstance(domain, Box):
        return float(np.prod(domain.hi - domain.lo))
    raise ValueError(f"no volume for {type(domain).__name__}")


def distance_to(domain: Region, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, domain.dim)
    if isinstance(domain, Ball):
        return np.maximum(np.linalg.norm(pts - domain.center, axis=1) - domain.radius, 0.0)
    if isinstance(domain, ConvexPolygon):
        return np.array([np.linalg.norm(p - domain.project(p)) for p in pts])
    if isinstance(domain, Box):
        return np.linalg.norm(pts - np.clip(pts, domain.lo, domain.hi), axis=1)
    raise ValueError(f"no distance for {type(domain).__name__}")


def _lattice(n: int, r: float) -> Tuple[np.ndarray, float, str]:
    if n == 2:
        spacing = r * math.sqrt(3.0)
        basis = np.array([[spacing, 0.0], [spacing / 2.0, spacing * math.sqrt(3.0) / 2.0]])
        return basis, spacing, "hex"
    spacing = 2.0 * r / math.sqrt(n)
    return spacing * np.eye(n), spacing, "cubic"


def _keep(domain: Region, candidates: np.ndarray, r: float) -> np.ndarray:
    if not len(candidates):
        return candidates
    return candidates[distance_to(domain, candidates) < r]


def _slabs(domain: Region, r: float, anchor: np.ndarray, basis: np.ndarray,
           reach: float, spacing: float) -> Iterator[np.ndarray]:
    """Lattice points near the domain, one value of the first coefficient at a time."""
    n = len(anchor)
    steps = int(math.ceil(2.0 * reach / spacing)) + 1
    rest = np.indices((2 * steps + 1,) * (n - 1)).reshape(n - 1, -1).T - steps
    for i in range(-steps, steps + 1):
        coeffs = np.hstack([np.full((len(rest), 1), i), rest]).astype(float)
        candidates = anchor + coeffs @ basis
        near = np.all(np.abs(candidates - anchor) <= reach + r, axis=1)
        yield _keep(domain, candidates[near], r)


def _around(domain: Region, r: float, anchor: np.ndarray, basis: np.ndarray,
            near: np.ndarray, reach: float) -> Iterator[np.ndarray]:
    """Lattice points within ``reach`` of the sample points ``near``."""
    n = len(anchor)
    inverse = np.linalg.inv(basis)
    corners = np.array(list(itertools.product((-reach, reach), repeat=n)))
    span = np.abs(corners @ inverse).max(axis=0)
    m = np.ceil(span).astype(int) + 1
    offsets = np.indices(tuple(2 * m + 1)).reshape(n, -1).T - m
    base = np.unique(np.floor((near - anchor) @ inverse).astype(np.int64), axis=0)
    tree = cKDTree(near)
    seen = set()
    for start in range(0, len(base), CHUNK):
        block = base[start:start + CHUNK]
        coeffs = np.unique((block[:, None, :] + offsets[None, :, :]).reshape(-1, n), axis=0)
        fresh = np.array([c for c in map(tuple, coeffs) if c not in seen], dtype=float)
        if not len(fresh):
            continue
        seen.update(map(tuple, fresh.astype(np.int64)))
        candidates = anchor + fresh @ basis
        dist, _ = tree.query(candidates)
        yield _keep(domain, candidates[dist <= reach], r)


def cover_centers(domain: Region, r: float, near: Optional[np.ndarray] = None) -> CoverCenters:
    """Lattice cover: hexagonal in the plane, cubic in space.

    With ``near`` only the centers within 2r + spacing of those points are kept.
    An empty ``near`` keeps the centers around the middle of the domain.
    """
    if r <= 0:
        raise ValueError(f"cover radius must be positive, got {r}")
    n = domain.dim
    lo, hi = domain_bounds(domain)
    anchor = (lo + hi) / 2.0
    basis, spacing, lattice = _lattice(n, r)
    if near is None:
        reach = float(np.max(hi - lo)) / 2.0 + 2.0 * spacing
        parts = list(_slabs(domain, r, anchor, basis, reach, spacing))
    else:
        near = np.asarray(near, dtype=float).reshape(-1, n)
        if not len(near):
            near = anchor[None, :]
        parts = list(_around(domain, r, anchor, basis, near, 2.0 * r + spacing))
    parts = [p for p in parts if len(p)]
    points = np.concatenate(parts) if parts else np.empty((0, n))
    points = points[np.lexsort(points.T[::-1])] if len(points) else points
    logger.debug(f"cover of {type(domain).__name__} at r={r}: L={len(points)}")
    return CoverCenters(points, float(r), float(spacing), lattice)


def support_points(chains: Iterable, step: float) -> np.ndarray:
    """Points of the chains' supports, at most ``step`` apart along every segment."""
    out = []
    for chain in chains:
        if chain.is_empty:
            continue
        if isinstance(chain, ZeroChain):
            out.append(chain.points)
            continue
        for a, b in chain.segments:
            count = max(int(math.ceil(np.linalg.norm(b - a) / step)), 1)
            t = np.linspace(0.0, 1.0, count + 1)[:, None]
            out.append(a + t * (b - a))
    return np.concatenate(out) if out else np.empty((0, 0))


def sample_domain(domain: Region, count: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = domain_bounds(domain)
    out = []
    while sum(len(o) for o in out) < count:
        batch = rng.uniform(lo, hi, size=(2 * count, len(lo)))
        out.append(batch[domain.contains(batch)])
    return np.concatenate(out)[:count]


def verify_coverage(cover: CoverCenters, domain: Region, samples: int = 10_000,
                    seed: int = 0) -> Tuple[bool, float]:
    """Dense sampling check; returns (covered, worst nearest-center distance)."""
    pts = sample_domain(domain, samples, np.random.default_rng(seed))
    dist, _ = cover.tree().query(pts)
    worst = float(dist.max()) if len(dist) else 0.0
    return worst <= cover.r + eps_geom(), worst


def measured_constant(cover: CoverCenters, domain: Region) -> float:
    return cover.L * cover.r**cover.dim / domain_volume(domain)
