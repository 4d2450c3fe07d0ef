"""Grids from ordered balls: D_l = closure(B_l) minus the earlier open balls."""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from chains.one import OneChain
from chains.regions import Ball, Complement, Intersection, Region, Union
from chains.zero import ZeroChain

Label = Tuple[int, ...]
OUTSIDE = -1


class Grid:
    """One or more layers of balls around shared centers.

    A point is labelled by the index of the first ball containing it in every
    layer; a single-layer grid has one-element labels. Points outside every ball
    of a layer get ``OUTSIDE`` for that layer.
    """

    def __init__(self, centers: np.ndarray, radii: Sequence[Sequence[float]]):
        self.centers = np.asarray(centers, dtype=float)
        self.radii = [np.asarray(layer, dtype=float) for layer in radii]
        for layer in self.radii:
            if layer.shape != (len(self.centers),):
                raise ValueError(f"{len(layer)} radii for {len(self.centers)} centers")
        self._tree = cKDTree(self.centers) if len(self.centers) else None

    @classmethod
    def single(cls, centers: np.ndarray, radii: Sequence[float]) -> "Grid":
        return cls(centers, [radii])

    @property
    def L(self) -> int:
        return len(self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def layers(self) -> int:
        return len(self.radii)

    def layer(self, index: int) -> "Grid":
        return Grid(self.centers, [self.radii[index]])

    def combine(self, other: "Grid") -> "Grid":
        """Common refinement: the domains are the intersections of both grids' domains."""
        if other.L != self.L or not np.array_equal(other.centers, self.centers):
            raise ValueError("grids over different centers cannot be combined")
        return Grid(self.centers, self.radii + other.radii)

    def label_points(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        labels = np.full((len(pts), self.layers), OUTSIDE, dtype=int)
        if not len(pts) or self._tree is None:
            return labels
        for k, radii in enumerate(self.radii):
            reach = self._tree.query_ball_point(pts, radii.max())
            for i, near in enumerate(reach):
                for l in sorted(near):
                    if np.linalg.norm(pts[i] - self.centers[l]) <= radii[l]:
                        labels[i, k] = l
                        break
        return labels

    def _crossings(self, a: np.ndarray, b: np.ndarray) -> List[float]:
        ts = set()
        reach = np.linalg.norm(b - a) / 2.0
        mid = (a + b) / 2.0
        for radii in self.radii:
            for l in self._tree.query_ball_point(mid, reach + radii.max()):
                for lo, hi in Ball(self.centers[l], radii[l]).segment_intervals(a, b):
                    ts.update(t for t in (lo, hi) if 0.0 < t < 1.0)
        return sorted(ts)

    def split(self, chain: OneChain) -> Dict[Label, OneChain]:
        """Pieces of a chain per domain, cut at every sphere of the grid."""
        pieces: Dict[Label, List] = defaultdict(list)
        if chain.is_empty or self._tree is None:
            return {}
        for a, b in chain.segments:
            ts = [0.0] + self._crossings(a, b) + [1.0]
            starts = [a + t * (b - a) for t in ts]
            mids = np.array([a + 0.5 * (t0 + t1) * (b - a) for t0, t1 in zip(ts, ts[1:])])
            labels = self.label_points(mids)
            for k in range(len(ts) - 1):
                pieces[tuple(labels[k])].append((starts[k], starts[k + 1]))
        return {label: OneChain(segs, dim=chain.dim) for label, segs in sorted(pieces.items())}

    def split_points(self, chain: ZeroChain) -> Dict[Label, ZeroChain]:
        if chain.is_empty:
            return {}
        labels = self.label_points(chain.points)
        out: Dict[Label, ZeroChain] = {}
        for label in sorted({tuple(row) for row in labels}):
            mask = np.all(labels == np.array(label), axis=1)
            out[label] = ZeroChain(chain.points[mask], reduced=True)
        return out

    def domain_region(self, label: Label) -> Region:
        parts: List[Region] = []
        for k, l in enumerate(label):
            ball = Ball(self.centers[l], self.radii[k][l])
            if l == 0:
                parts.append(ball)
                continue
            earlier = Union([Ball(self.centers[m], self.radii[k][m]) for m in range(l)],
                            dim=self.dim)
            parts.append(Intersection([ball, Complement(earlier)]))
        return parts[0] if len(parts) == 1 else Intersection(parts)

    def domain_radius(self, label: Label) -> Tuple[np.ndarray, float]:
        """A ball containing the domain: the smallest of its layer balls."""
        k = int(np.argmin([self.radii[k][l] for k, l in enumerate(label)]))
        l = label[k]
        return self.centers[l], float(self.radii[k][l])

    def mass_partition(self, chain: OneChain) -> Tuple[float, float]:
        """Total mass of a chain and the sum over domains of its pieces."""
        pieces = self.split(chain)
        return chain.mass, float(sum(p.mass for p in pieces.values()))
