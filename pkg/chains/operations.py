"""Chain operations used throughout the pipelines."""

from __future__ import annotations

import math
from typing import List, Union as TypingUnion

import networkx as nx
import numpy as np

from chains.one import OneChain
from chains.regions import Region
from chains.tolerance import eps_geom
from chains.zero import ZeroChain
from core.errors import TangencyError

Chain = TypingUnion[ZeroChain, OneChain]


def add_zero(a: ZeroChain, b: ZeroChain) -> ZeroChain:
    return a + b


def boundary_one(c: OneChain) -> ZeroChain:
    return c.boundary()


def restrict(c: Chain, region: Region) -> Chain:
    return c.restrict(region)


def slice_sphere(c: OneChain, center, s: float) -> ZeroChain:
    center = np.asarray(center, dtype=float)
    eps = eps_geom()
    hits = []
    for a, b in c.segments:
        d = b - a
        length = float(np.linalg.norm(d))
        u = d / length
        f = a - center
        along = float(f @ u)
        height = float(np.linalg.norm(f - along * u))
        foot = -along / length
        if abs(height - s) <= eps and -eps <= foot <= 1.0 + eps:
            raise TangencyError(f"segment tangent to sphere of radius {s} at {center.tolist()}")
        if height >= s:
            continue
        half = math.sqrt(s * s - height * height) / length
        lo, hi = foot - half, foot + half
        tol = eps / length
        for t in (lo, hi):
            # a vertex on the sphere counts only for the segment running inside from it
            if abs(t) <= tol:
                if t == lo and hi > tol:
                    hits.append(a.copy())
            elif abs(t - 1.0) <= tol:
                if t == hi and lo < 1.0 - tol:
                    hits.append(b.copy())
            elif 0.0 < t < 1.0:
                hits.append(a + t * d)
    return ZeroChain(hits, dim=c.dim)


def slice_count(c: OneChain, center, s: float) -> int:
    """Raw number of segment-sphere crossings before parity cancellation."""
    center = np.asarray(center, dtype=float)
    if c.is_empty:
        return 0
    a, b = c.segments[:, 0], c.segments[:, 1]
    da = np.linalg.norm(a - center, axis=1)
    db = np.linalg.norm(b - center, axis=1)
    near = segment_distance(c.segments, center)
    lo, hi = np.minimum(da, db), np.maximum(da, db)
    return int(np.sum((near < s) & (s < lo)) * 2 + np.sum((lo < s) & (s < hi)))


def segment_distance(segments: np.ndarray, point: np.ndarray) -> np.ndarray:
    a, b = segments[:, 0], segments[:, 1]
    d = b - a
    t = np.clip(np.sum((point - a) * d, axis=1) / np.sum(d * d, axis=1), 0.0, 1.0)
    return np.linalg.norm(a + t[:, None] * d - point, axis=1)


def cone_fill(z: ZeroChain, apex) -> OneChain:
    apex = np.asarray(apex, dtype=float)
    if z.is_empty:
        return OneChain.empty(z.dim)
    segs = [(apex, p) for p in z.points if np.linalg.norm(p - apex) > eps_geom()]
    return OneChain(segs, dim=z.dim)


def homothety(c: Chain, center, lam: float) -> Chain:
    center = np.asarray(center, dtype=float)
    if isinstance(c, ZeroChain):
        return ZeroChain(center + lam * (c.points - center), dim=c.dim)
    return OneChain(center + lam * (c.segments - center), dim=c.dim)


def components(c: OneChain) -> List[OneChain]:
    """Connected components, ordered by their lexicographically first segment."""
    if c.is_empty:
        return []
    tol = eps_geom() * 10
    graph = nx.Graph()
    keys = np.round(c.endpoints() / tol).astype(np.int64)
    for i in range(len(c)):
        graph.add_edge(("s", i), tuple(keys[2 * i]))
        graph.add_edge(("s", i), tuple(keys[2 * i + 1]))
    groups = []
    for comp in nx.connected_components(graph):
        idx = sorted(node[1] for node in comp if node[0] == "s")
        groups.append(idx)
    groups.sort(key=lambda idx: idx[0])
    return [OneChain(c.segments[idx], reduced=True) for idx in groups]
