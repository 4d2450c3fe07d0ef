"""The chopping operator d_l and its memoized radii r_l(tau)."""

from __future__ import annotations

import logging
import threading
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from chains.one import OneChain
from chains.operations import segment_distance
from chains.regions import Ball, Complement
from chains.zero import ZeroChain
from coarea.cover import CoverCenters
from coarea.radii import select_radius

logger = logging.getLogger("Coarea")


class Chopper:
    """Radii r_l(tau) that depend only on tau restricted to B(x_l, 2r).

    The memo is shared between threads; the first writer of a key wins and every
    later reader sees that value.
    """

    def __init__(self, centers: CoverCenters, K: int = 1):
        self.centers = centers
        self.K = K
        self._memo: Dict[Tuple[int, bytes], float] = {}
        self._lock = threading.Lock()

    @property
    def L(self) -> int:
        return self.centers.L

    def local(self, tau: OneChain, l: int) -> OneChain:
        x = self.centers.points[l]
        return tau.restrict(Ball(x, 2.0 * self.centers.r)).normalized()

    def radius(self, tau: OneChain, l: int) -> float:
        local = self.local(tau, l)
        key = (l, local.key())
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        r = self.centers.r
        if local.is_empty:
            value = 1.5 * r
        else:
            value = select_radius(self.centers.points[l], [local], self.K, r)
        with self._lock:
            return self._memo.setdefault(key, value)

    @property
    def memo_size(self) -> int:
        return len(self._memo)

    def active(self, chains: Iterable) -> List[int]:
        """Centers whose 2r-ball meets the support of any of the chains."""
        reach = 2.0 * self.centers.r
        hit = np.zeros(self.L, dtype=bool)
        for chain in chains:
            if chain.is_empty:
                continue
            if isinstance(chain, ZeroChain):
                dist = np.linalg.norm(
                    self.centers.points[:, None, :] - chain.points[None, :, :], axis=2
                ).min(axis=1)
            else:
                dist = np.array([segment_distance(chain.segments, x).min()
                                 for x in self.centers.points])
            hit |= dist < reach
        return [int(l) for l in np.flatnonzero(hit)]

    def remove(self, tau: OneChain, current: OneChain, l: int) -> OneChain:
        ball = Ball(self.centers.points[l], self.radius(tau, l))
        return current.restrict(Complement(ball))

    def chop(self, tau: OneChain, l: int) -> OneChain:
        """d_l(tau): tau outside the first l balls of the cover order."""
        if not 0 <= l <= self.L:
            raise ValueError(f"chop index {l} outside [0, {self.L}]")
        return self.chop_sequence(tau, range(self.L), l)

    def chop_sequence(self, tau: OneChain, order: Sequence[int], steps: Optional[int] = None
                      ) -> OneChain:
        steps = len(order) if steps is None else steps
        current = tau
        for l in list(order)[:steps]:
            if current.is_empty:
                break
            current = self.remove(tau, current, l)
        return current

    def prefixes(self, tau: OneChain, order: Sequence[int]) -> List[OneChain]:
        """d_0(tau), ..., d_m(tau) along an explicit center order."""
        out = [tau]
        current = tau
        for l in order:
            if not current.is_empty:
                current = self.remove(tau, current, l)
            out.append(current)
        return out


def chop(tau: OneChain, l: int, centers: CoverCenters) -> OneChain:
    return Chopper(centers).chop(tau, l)
