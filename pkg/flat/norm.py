"""Flat norm of mod-2 0-cycles as an exact min-cost matching."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy.spatial.distance import cdist

from chains.one import OneChain
from chains.regions import Region, unit_disk
from chains.zero import ZeroChain
from core.errors import NonConvexDomain, OddParity, TooLarge

logger = logging.getLogger("FlatNorm")

ABSOLUTE = "absolute"
RELATIVE = "relative"
ORACLE_LIMIT = 10

Pair = Tuple[np.ndarray, np.ndarray]


@dataclass
class FlatWitness:
    value: float
    matched_pairs: List[Pair] = field(default_factory=list)
    dropped: List[np.ndarray] = field(default_factory=list)
    boundary_projected: List[Pair] = field(default_factory=list)
    dim: int = 2

    def alpha(self) -> ZeroChain:
        return ZeroChain(self.dropped, dim=self.dim)

    def beta(self) -> OneChain:
        segs = list(self.matched_pairs) + list(self.boundary_projected)
        return OneChain(segs, dim=self.dim)

    def feet(self) -> ZeroChain:
        return ZeroChain([foot for _, foot in self.boundary_projected], dim=self.dim)

    def reconstructs(self, z: ZeroChain) -> bool:
        """Check z = alpha + boundary(beta), modulo the boundary feet in relative mode."""
        return self.alpha() + self.beta().boundary() + self.feet() == z

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "matched_pairs": [[p.tolist(), q.tolist()] for p, q in self.matched_pairs],
            "dropped": [p.tolist() for p in self.dropped],
            "boundary_projected": [[p.tolist(), f.tolist()] for p, f in self.boundary_projected],
        }


def _check_domain(domain: Region) -> None:
    if not domain.is_convex:
        raise NonConvexDomain(f"flat norm needs a convex domain, got {type(domain).__name__}")


def _opt_out_costs(points: np.ndarray, domain: Region, mode: str) -> np.ndarray:
    if mode == ABSOLUTE:
        return np.ones(len(points))
    if mode != RELATIVE:
        raise ValueError(f"unknown flat norm mode {mode!r}")
    return np.minimum(1.0, np.maximum(domain.boundary_distance(points), 0.0))


def flat_norm(z: ZeroChain, domain: Optional[Region] = None, mode: str = ABSOLUTE) -> FlatWitness:
    domain = domain if domain is not None else unit_disk(z.dim)
    _check_domain(domain)
    pts = z.points
    m = len(pts)
    if m == 0:
        return FlatWitness(0.0, dim=z.dim)
    opt = _opt_out_costs(pts, domain, mode)
    dist = cdist(pts, pts)

    # maximum-weight perfect matching on points plus one opt-out twin per point
    big = 3.0
    graph = nx.Graph()
    for i in range(m):
        graph.add_edge(i, ("opt", i), weight=big - opt[i])
        for j in range(i + 1, m):
            graph.add_edge(("opt", i), ("opt", j), weight=big)
            if dist[i, j] <= opt[i] + opt[j]:
                graph.add_edge(i, j, weight=big - dist[i, j])
    matching = nx.max_weight_matching(graph, maxcardinality=True)

    pairs, dropped, projected = [], [], []
    value = 0.0
    for u, v in matching:
        if isinstance(u, tuple) and isinstance(v, tuple):
            continue
        if isinstance(u, tuple) or isinstance(v, tuple):
            i = v if isinstance(u, tuple) else u
            value += opt[i]
            if mode == RELATIVE and opt[i] < 1.0:
                projected.append((pts[i], domain.boundary_foot(pts[i])))
            else:
                dropped.append(pts[i])
            continue
        i, j = sorted((u, v))
        value += dist[i, j]
        pairs.append((pts[i], pts[j]))
    pairs.sort(key=lambda pq: (tuple(pq[0]), tuple(pq[1])))
    dropped.sort(key=tuple)
    projected.sort(key=lambda pf: tuple(pf[0]))
    return FlatWitness(float(value), pairs, dropped, projected, dim=z.dim)


def flat_norm_oracle(z: ZeroChain, domain: Optional[Region] = None, mode: str = ABSOLUTE) -> float:
    """Exhaustive minimum over all partial matchings and opt-outs."""
    domain = domain if domain is not None else unit_disk(z.dim)
    _check_domain(domain)
    m = len(z)
    if m > ORACLE_LIMIT:
        raise TooLarge(f"oracle handles at most {ORACLE_LIMIT} points, got {m}")
    if m == 0:
        return 0.0
    pts = z.points
    opt = _opt_out_costs(pts, domain, mode)
    dist = cdist(pts, pts)
    full = (1 << m) - 1
    best = {full: 0.0}

    def solve(mask: int) -> float:
        if mask in best:
            return best[mask]
        i = next(k for k in range(m) if not mask & (1 << k))
        cost = opt[i] + solve(mask | (1 << i))
        for j in range(i + 1, m):
            if not mask & (1 << j):
                cost = min(cost, dist[i, j] + solve(mask | (1 << i) | (1 << j)))
        best[mask] = cost
        return cost

    return float(solve(0))


def flat_distance(a: ZeroChain, b: ZeroChain, domain: Optional[Region] = None,
                  mode: str = ABSOLUTE) -> float:
    return flat_norm(a + b, domain, mode).value


def perfect_matching_filling(z: ZeroChain) -> OneChain:
    """Shortest straight-segment pairing of an even 0-cycle."""
    if z.mass % 2:
        raise OddParity(f"cannot fill a 0-cycle of odd mass {z.mass}")
    pts = z.points
    dist = cdist(pts, pts)
    big = float(dist.max()) + 1.0 if len(pts) else 1.0
    graph = nx.Graph()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            graph.add_edge(i, j, weight=big - dist[i, j])
    matching = nx.max_weight_matching(graph, maxcardinality=True)
    return OneChain([(pts[i], pts[j]) for i, j in matching], dim=z.dim)


def edge_filling(z: ZeroChain, domain: Optional[Region] = None) -> OneChain:
    """Optimal absolute filling of an even 0-cycle."""
    if z.mass % 2:
        raise OddParity(f"cannot fill a 0-cycle of odd mass {z.mass}")
    if z.is_empty:
        return OneChain.empty(z.dim)
    witness = flat_norm(z, domain, ABSOLUTE)
    if witness.dropped:
        logger.debug(f"witness drops {len(witness.dropped)} points, using perfect matching")
        return perfect_matching_filling(z)
    return witness.beta()
