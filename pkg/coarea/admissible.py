from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from chains.one import OneChain
from chains.reduction import cluster_labels
from chains.zero import ZeroChain
from core.errors import BudgetExceeded, hard_assert

BallSpec = Tuple[np.ndarray, float]


@dataclass(frozen=True)
class AdmissibleFamily:
    balls: Tuple[Tuple[Tuple[float, ...], float], ...]
    delta: float

    @classmethod
    def from_specs(cls, specs: Iterable[BallSpec], delta: float) -> "AdmissibleFamily":
        balls = tuple(sorted((tuple(float(x) for x in c), float(r)) for c, r in specs))
        return cls(balls, float(delta))

    @classmethod
    def empty(cls, delta: float = 0.0) -> "AdmissibleFamily":
        return cls((), float(delta))

    @property
    def count(self) -> int:
        return len(self.balls)

    @property
    def radius_sum(self) -> float:
        return float(sum(r for _, r in self.balls))

    def specs(self) -> List[BallSpec]:
        return [(np.asarray(c), r) for c, r in self.balls]

    def is_disjoint(self) -> bool:
        specs = self.specs()
        for i in range(len(specs)):
            for j in range(i + 1, len(specs)):
                if np.linalg.norm(specs[i][0] - specs[j][0]) < specs[i][1] + specs[j][1]:
                    return False
        return True

    def is_admissible(self) -> bool:
        return self.is_disjoint() and (self.radius_sum < self.delta or not self.balls)

    def validate(self) -> "AdmissibleFamily":
        if not self.is_disjoint():
            raise BudgetExceeded("balls of an admissible family overlap")
        if self.balls and self.radius_sum >= self.delta:
            raise BudgetExceeded(f"radius sum {self.radius_sum:.6g} >= delta {self.delta:.6g}")
        return self

    def covers(self, chain) -> bool:
        return chain.support_within(self.specs())

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "balls": [{"center": list(c), "radius": r} for c, r in self.balls],
        }


def enclosing_ball(a: BallSpec, b: BallSpec) -> BallSpec:
    (ca, ra), (cb, rb) = a, b
    d = float(np.linalg.norm(cb - ca))
    if d + rb <= ra:
        return ca, ra
    if d + ra <= rb:
        return cb, rb
    radius = 0.5 * (d + ra + rb)
    return ca + (radius - ra) * (cb - ca) / d, radius


def merge_admissible(balls: Sequence[BallSpec], delta: Optional[float] = None,
                     budget: Optional[float] = None) -> AdmissibleFamily:
    """Greedy merge of overlapping balls into a disjoint family covering them."""
    work = [(np.asarray(c, dtype=float), float(r)) for c, r in balls if r > 0.0]
    total_in = sum(r for _, r in work)
    if budget is not None and total_in > budget / 3.0:
        raise BudgetExceeded(f"input radius sum {total_in:.6g} exceeds a third of {budget:.6g}")
    merged = True
    while merged and len(work) > 1:
        merged = False
        centers = np.array([c for c, _ in work])
        radii = np.array([r for _, r in work])
        dist = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=2)
        overlap = dist < radii[:, None] + radii[None, :]
        np.fill_diagonal(overlap, False)
        hits = np.argwhere(np.triu(overlap))
        if len(hits):
            i, j = hits[0]
            joined = enclosing_ball(work[i], work[j])
            work = [b for k, b in enumerate(work) if k not in (i, j)] + [joined]
            merged = True
    total_out = sum(r for _, r in work)
    hard_assert(total_out <= 3.0 * total_in + 1e-12, "merge_radius_bound",
                f"{total_out:.6g} > 3 * {total_in:.6g}")
    if delta is None:
        delta = max(3.0 * total_in, total_out) * (1.0 + 1e-9) + 1e-15
    family = AdmissibleFamily.from_specs(work, delta)
    if family.balls and family.radius_sum >= family.delta:
        raise BudgetExceeded(f"merged radius sum {family.radius_sum:.6g} >= {delta:.6g}")
    return family


def cover_support(chains: Iterable, rho: float) -> List[BallSpec]:
    """Balls of radius ~rho around every point and segment of the given chains."""
    out: List[BallSpec] = []
    for chain in chains:
        if isinstance(chain, ZeroChain):
            out.extend((p.copy(), rho) for p in chain.points)
        elif isinstance(chain, OneChain):
            for a, b in chain.segments:
                out.append(((a + b) / 2.0, float(np.linalg.norm(b - a)) / 2.0 + rho))
        else:
            raise TypeError(f"cannot cover {type(chain).__name__}")
    return out


def _support_points(chains: Iterable) -> Tuple[np.ndarray, np.ndarray]:
    """Support sample points and the component id forced by segment connectivity."""
    points, owners = [], []
    count = 0
    for chain in chains:
        if isinstance(chain, ZeroChain):
            for p in chain.points:
                points.append(p)
                owners.append(count)
                count += 1
        elif isinstance(chain, OneChain):
            for a, b in chain.segments:
                points.extend([a, b, (a + b) / 2.0])
                owners.extend([count] * 3)
                count += 1
        else:
            raise TypeError(f"cannot cover {type(chain).__name__}")
    return np.asarray(points, dtype=float), np.asarray(owners, dtype=int)


def cluster_support(chains: Iterable, link: float, rho: float) -> List[BallSpec]:
    """One ball per cluster of support pieces chained within ``link``."""
    chains = [c for c in chains if not c.is_empty]
    if not chains:
        return []
    points, owners = _support_points(chains)
    labels = cluster_labels(points, link)
    # pieces of one segment must share a cluster
    joined = np.arange(labels.max() + 1)
    for owner in np.unique(owners):
        members = np.unique(labels[owners == owner])
        root = joined[members].min()
        for m in members:
            joined[joined == joined[m]] = root
    labels = joined[labels]
    out: List[BallSpec] = []
    for label in np.unique(labels):
        pts = points[labels == label]
        center = (pts.min(axis=0) + pts.max(axis=0)) / 2.0
        radius = float(np.linalg.norm(pts - center, axis=1).max()) + rho
        out.append((center, radius))
    return out


def certificate(chains: Iterable, rho: float, delta: Optional[float] = None,
                link: Optional[float] = None) -> AdmissibleFamily:
    chains = list(chains)
    balls = cover_support(chains, rho) if link is None else cluster_support(chains, link, rho)
    return merge_admissible(balls, delta=delta)


def monotone_constant(p: int) -> int:
    c = 1
    for j in range(2, p + 1):
        c = 3 * (1 + 2 * j * c)
    return c
