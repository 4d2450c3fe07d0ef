from __future__ import annotations

from typing import Iterator, Sequence, Tuple

import numpy as np

from chains.reduction import lex_order, mod2_keep, quantize
from chains.regions import Region
from chains.tolerance import eps_geom

BallSpec = Tuple[Sequence[float], float]


class ZeroChain:
    """Finite mod-2 point set in canonical form."""

    __slots__ = ("_points",)

    def __init__(self, points=(), dim: int = 2, *, reduced: bool = False):
        arr = np.asarray(points, dtype=float)
        if arr.size == 0:
            arr = np.empty((0, arr.shape[1] if arr.ndim == 2 and arr.shape[1] else dim))
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coordinates in ZeroChain")
        if not reduced:
            arr = arr[mod2_keep(arr, eps_geom())]
        arr = np.ascontiguousarray(arr[lex_order(arr)])
        arr.setflags(write=False)
        self._points = arr

    @classmethod
    def empty(cls, dim: int) -> "ZeroChain":
        return cls(np.empty((0, dim)), reduced=True)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def mass(self) -> int:
        return len(self._points)

    @property
    def is_empty(self) -> bool:
        return len(self._points) == 0

    def __len__(self) -> int:
        return len(self._points)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self._points)

    def __repr__(self) -> str:
        return f"ZeroChain({self._points.tolist()})"

    def __add__(self, other: "ZeroChain") -> "ZeroChain":
        if other.is_empty:
            return self
        if self.is_empty:
            return other
        return ZeroChain(np.vstack([self._points, other._points]))

    __sub__ = __add__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZeroChain):
            return NotImplemented
        if len(self) != len(other):
            return False
        return (self + other).is_empty

    __hash__ = None

    def key(self) -> bytes:
        return quantize(self._points, eps_geom() * 10)

    def restrict(self, region: Region) -> "ZeroChain":
        if self.is_empty:
            return self
        return ZeroChain(self._points[region.contains(self._points)], reduced=True)

    def uncovered(self, balls: Sequence[BallSpec]) -> "ZeroChain":
        if self.is_empty or not balls:
            return self
        centers = np.array([c for c, _ in balls], dtype=float)
        radii = np.array([r for _, r in balls], dtype=float)
        dist = np.linalg.norm(self._points[:, None, :] - centers[None, :, :], axis=2)
        covered = np.any(dist < radii[None, :] + eps_geom(), axis=1)
        return ZeroChain(self._points[~covered], reduced=True)

    def support_within(self, balls: Sequence[BallSpec]) -> bool:
        return self.uncovered(balls).is_empty

    def to_list(self) -> list:
        return self._points.tolist()
