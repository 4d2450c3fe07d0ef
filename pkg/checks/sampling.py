"""Random chains for the property checks."""

import numpy as np

from chains.one import OneChain
from chains.regions import Region
from chains.zero import ZeroChain
from coarea.cover import sample_domain


def random_points(rng: np.random.Generator, domain: Region, max_points: int) -> ZeroChain:
    count = int(rng.integers(0, max_points + 1))
    if count == 0:
        return ZeroChain.empty(domain.dim)
    return ZeroChain(sample_domain(domain, count, rng), dim=domain.dim)


def random_segments(rng: np.random.Generator, domain: Region, count: int,
                    max_length: float = 0.5) -> OneChain:
    """Segments with both ends in a convex domain and bounded length."""
    starts = sample_domain(domain, count, rng)
    segments = []
    for a in starts:
        for _ in range(50):
            u = rng.normal(size=domain.dim)
            b = a + rng.uniform(0.02, max_length) * u / np.linalg.norm(u)
            if domain.contains_point(b):
                segments.append((a, b))
                break
    return OneChain(segments, dim=domain.dim)
