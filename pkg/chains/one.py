from __future__ import annotations

from typing import List, Sequence

import numpy as np

from chains.reduction import cluster_labels, lex_order, mod2_keep, quantize
from chains.regions import Ball, Complement, Region, Union
from chains.tolerance import eps_geom
from chains.zero import BallSpec, ZeroChain

LINE_TOL = 1e-8


def _orient(segments: np.ndarray) -> np.ndarray:
    diff = segments[:, 1] - segments[:, 0]
    first = np.argmax(diff != 0.0, axis=1)
    swap = diff[np.arange(len(diff)), first] < 0.0
    out = segments.copy()
    out[swap] = out[swap][:, ::-1]
    return out


class OneChain:
    """Finite mod-2 sum of straight segments.

    Canonical form drops segments shorter than the tolerance, orients every
    segment lexicographically and cancels pairs with equal endpoint pairs.
    Overlapping segments that are not equal survive; ``normalized`` merges them.
    """

    __slots__ = ("_segments",)

    def __init__(self, segments=(), dim: int = 2, *, reduced: bool = False):
        arr = np.asarray(segments, dtype=float)
        if arr.size == 0:
            arr = np.empty((0, 2, arr.shape[2] if arr.ndim == 3 and arr.shape[2] else dim))
        if arr.ndim != 3 or arr.shape[1] != 2:
            raise ValueError(f"segments must have shape (s, 2, n), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coordinates in OneChain")
        if not reduced and len(arr):
            eps = eps_geom()
            arr = arr[np.linalg.norm(arr[:, 1] - arr[:, 0], axis=1) > eps]
            arr = _orient(arr)
            flat = arr.reshape(len(arr), 2 * arr.shape[2])
            arr = arr[mod2_keep(flat, 1.5 * eps)]
        flat = arr.reshape(len(arr), 2 * arr.shape[2])
        arr = np.ascontiguousarray(arr[lex_order(flat)])
        arr.setflags(write=False)
        self._segments = arr

    @classmethod
    def empty(cls, dim: int) -> "OneChain":
        return cls(np.empty((0, 2, dim)), reduced=True)

    @property
    def segments(self) -> np.ndarray:
        return self._segments

    @property
    def dim(self) -> int:
        return self._segments.shape[2]

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self._segments[:, 1] - self._segments[:, 0], axis=1)

    @property
    def mass(self) -> float:
        return float(self.lengths.sum())

    @property
    def is_empty(self) -> bool:
        return len(self._segments) == 0

    def __len__(self) -> int:
        return len(self._segments)

    def __repr__(self) -> str:
        return f"OneChain({len(self)} segments, mass={self.mass:.6g})"

    def __add__(self, other: "OneChain") -> "OneChain":
        if other.is_empty:
            return self
        if self.is_empty:
            return other
        return OneChain(np.concatenate([self._segments, other._segments]))

    __sub__ = __add__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OneChain):
            return NotImplemented
        return len(self) == len(other) and (self + other).is_empty

    __hash__ = None

    def key(self) -> bytes:
        return quantize(self._segments, eps_geom() * 10)

    def boundary(self) -> ZeroChain:
        if self.is_empty:
            return ZeroChain.empty(self.dim)
        return ZeroChain(self._segments.reshape(-1, self.dim))

    def endpoints(self) -> np.ndarray:
        return self._segments.reshape(-1, self.dim)

    def restrict(self, region: Region) -> "OneChain":
        if self.is_empty:
            return self
        pieces = []
        for a, b in self._segments:
            for lo, hi in region.segment_intervals(a, b):
                start = a if lo <= 0.0 else a + lo * (b - a)
                end = b if hi >= 1.0 else a + hi * (b - a)
                pieces.append((start, end))
        return OneChain(pieces, dim=self.dim)

    def uncovered(self, balls: Sequence[BallSpec]) -> "OneChain":
        if self.is_empty or not balls:
            return self
        eps = eps_geom()
        cover = Union([Ball(c, r + eps) for c, r in balls], dim=self.dim)
        return self.restrict(Complement(cover))

    def support_within(self, balls: Sequence[BallSpec]) -> bool:
        return self.uncovered(balls).is_empty

    def normalized(self) -> "OneChain":
        """Geometric normal form: collinear pieces replaced by their mod-2 coverage."""
        if len(self) <= 1:
            return self
        segs = self._segments
        a, b = segs[:, 0], segs[:, 1]
        d = b - a
        u = d / np.linalg.norm(d, axis=1)[:, None]
        lead = np.argmax(np.abs(u) > 1e-9, axis=1)
        u = u * np.sign(u[np.arange(len(u)), lead])[:, None]
        foot = a - np.sum(a * u, axis=1)[:, None] * u
        labels = cluster_labels(np.hstack([u, foot]), LINE_TOL)
        pieces: List[np.ndarray] = []
        for label in np.unique(labels):
            members = np.flatnonzero(labels == label)
            if len(members) == 1:
                pieces.append(segs[members[0]])
                continue
            pieces.extend(_line_coverage(segs[members], u[members[0]]))
        if not pieces:
            return OneChain.empty(self.dim)
        return OneChain(np.stack(pieces))

    def geometrically_equal(self, other: "OneChain") -> bool:
        return (self + other).normalized().is_empty

    def to_list(self) -> list:
        return self._segments.tolist()


def _line_coverage(segs: np.ndarray, direction: np.ndarray) -> List[np.ndarray]:
    eps = eps_geom()
    points = segs.reshape(-1, segs.shape[2])
    params = points @ direction
    order = np.argsort(params, kind="stable")
    breaks: List[np.ndarray] = []
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and params[order[j + 1]] - params[order[j]] <= eps:
            j += 1
        if (j - i + 1) % 2 == 1:
            breaks.append(points[order[i]])
        i = j + 1
    return [np.stack([breaks[k], breaks[k + 1]]) for k in range(0, len(breaks) - 1, 2)]
