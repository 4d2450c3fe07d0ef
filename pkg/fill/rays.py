"""Ray fillings: each point is joined to the far exit of its line through the apex."""

from __future__ import annotations

from typing import Optional, Union

import numpy as np

from chains.one import OneChain
from chains.regions import Region, unit_disk
from chains.zero import ZeroChain
from fill.generic_point import GenericPoint

Apex = Union[GenericPoint, np.ndarray]


def _apex(P: Apex) -> np.ndarray:
    return np.asarray(P.P if isinstance(P, GenericPoint) else P, dtype=float)


def far_exit(point: np.ndarray, P: Apex, domain: Optional[Region] = None) -> np.ndarray:
    """Point of the line through P and ``point`` on the domain boundary furthest from P."""
    apex = _apex(P)
    domain = domain if domain is not None else unit_disk(len(apex))
    _, hi = domain.line_interval(apex, np.asarray(point, dtype=float))
    return apex + hi * (point - apex)


def far_exits(z: ZeroChain, P: Apex, domain: Optional[Region] = None) -> ZeroChain:
    if z.is_empty:
        return z
    return ZeroChain([far_exit(x, P, domain) for x in z.points], dim=z.dim)


def ray_fill(z: ZeroChain, P: Apex, domain: Optional[Region] = None) -> OneChain:
    """One segment per point, from the point to its far exit; the boundary is z + H(z).

    Raises TangentRay when a line through P only grazes the domain.
    """
    if z.is_empty:
        return OneChain.empty(z.dim)
    segments = [(x, far_exit(x, P, domain)) for x in z.points]
    return OneChain(segments, dim=z.dim)
