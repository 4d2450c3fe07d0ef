"""Free gaps among forbidden intervals on a line segment or a circle."""

from __future__ import annotations

import math
from typing import Sequence, Tuple

from chains.regions import merge_intervals

TAU = 2.0 * math.pi

Gap = Tuple[float, float]


def widest_gap(lo: float, hi: float, forbidden: Sequence[Tuple[float, float]]) -> Gap:
    """Midpoint and width of the widest sub-interval of [lo, hi] missing every forbidden one."""
    cursor, best = lo, (lo, lo)
    for a, b in merge_intervals([(max(a, lo), min(b, hi)) for a, b in forbidden]):
        if a - cursor > best[1] - best[0]:
            best = (cursor, a)
        cursor = max(cursor, b)
    if hi - cursor > best[1] - best[0]:
        best = (cursor, hi)
    return 0.5 * (best[0] + best[1]), best[1] - best[0]


def widest_free_angle(intervals: Sequence[Tuple[float, float]], period: float = TAU) -> Gap:
    """Midpoint and width of the widest arc of the circle missing every interval."""
    pieces = []
    for lo, hi in intervals:
        width = hi - lo
        if width >= period:
            return 0.0, 0.0
        lo %= period
        if lo + width > period:
            pieces += [(lo, period), (0.0, lo + width - period)]
        else:
            pieces.append((lo, lo + width))
    merged = merge_intervals(pieces)
    if not merged:
        return 0.0, period
    gaps = [(a[1], b[0]) for a, b in zip(merged, merged[1:])]
    gaps.append((merged[-1][1], merged[0][0] + period))
    lo, hi = max(gaps, key=lambda g: g[1] - g[0])
    return (0.5 * (lo + hi)) % period, hi - lo
