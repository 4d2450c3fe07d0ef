"""Coarea radius selection with exact breakpoints.

The raw number of crossings between a segment and the sphere S(x, s) is a step
function of s that only jumps at the distance from x to the segment and at the
distances to its endpoints. Scanning the elementary intervals between those
breakpoints gives the exact feasible set for the slice bound.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from chains.one import OneChain
from chains.operations import segment_distance, slice_sphere
from coarea.cover import CoverCenters
from core.errors import Infeasible, hard_assert

logger = logging.getLogger("Coarea")


def _crossing_counts(segments: np.ndarray, center: np.ndarray, s: np.ndarray) -> np.ndarray:
    if len(segments) == 0:
        return np.zeros(len(s), dtype=int)
    da = np.linalg.norm(segments[:, 0] - center, axis=1)
    db = np.linalg.norm(segments[:, 1] - center, axis=1)
    near = segment_distance(segments, center)
    lo, hi = np.minimum(da, db), np.maximum(da, db)
    s = s[:, None]
    twice = (near[None, :] < s) & (s < lo[None, :])
    once = (lo[None, :] < s) & (s < hi[None, :])
    return 2 * twice.sum(axis=1) + once.sum(axis=1)


def _breakpoints(segments: np.ndarray, center: np.ndarray) -> np.ndarray:
    if len(segments) == 0:
        return np.empty(0)
    da = np.linalg.norm(segments[:, 0] - center, axis=1)
    db = np.linalg.norm(segments[:, 1] - center, axis=1)
    return np.concatenate([da, db, segment_distance(segments, center)])


def select_radius(center: np.ndarray, chains: Sequence[OneChain], K: int, r: float,
                  avoid: Optional[np.ndarray] = None) -> float:
    """Midpoint of the largest elementary interval of [r, 2r] meeting every slice bound."""
    center = np.asarray(center, dtype=float)
    masses = [c.mass for c in chains]
    local = []
    for chain in chains:
        segs = chain.segments
        if len(segs):
            segs = segs[segment_distance(segs, center) < 2.0 * r]
        local.append(segs)
    breaks = [r, 2.0 * r]
    for segs in local:
        breaks.extend(_breakpoints(segs, center))
    if avoid is not None and len(avoid):
        breaks.extend(np.linalg.norm(np.asarray(avoid) - center, axis=1))
    grid = np.unique(np.clip(np.asarray(breaks), r, 2.0 * r))
    mids = 0.5 * (grid[:-1] + grid[1:])
    widths = grid[1:] - grid[:-1]
    feasible = widths > 0.0
    for segs, mass in zip(local, masses):
        feasible &= _crossing_counts(segs, center, mids) <= K * mass / r
    if not feasible.any():
        raise Infeasible(f"no radius in [{r}, {2 * r}] meets the slice bound at {center.tolist()}")
    best = int(np.argmax(np.where(feasible, widths, -1.0)))
    return float(mids[best])


def select_radii(centers: CoverCenters, chains: Sequence[OneChain], K: int,
                 indices: Optional[Iterable[int]] = None, avoid: Optional[np.ndarray] = None,
                 verify: bool = True) -> List[float]:
    if len(chains) > K:
        raise Infeasible(f"{len(chains)} chains exceed the compatibility constant K={K}")
    r = centers.r
    picked = range(centers.L) if indices is None else indices
    radii = []
    for l in picked:
        x = centers.points[l]
        s = select_radius(x, chains, K, r, avoid)
        if verify:
            for chain in chains:
                sliced = slice_sphere(chain, x, s)
                hard_assert(sliced.mass <= K * chain.mass / r + 1e-9, "slice_bound",
                            f"center {l}: {sliced.mass} > {K} * {chain.mass:.6g} / {r}")
        radii.append(s)
    return radii
