from __future__ import annotations

from typing import List

import numpy as np

from chains.one import OneChain
from chains.regions import ConvexPolytope
from chains.tolerance import eps_geom


def _areas(triangles: np.ndarray) -> np.ndarray:
    u = triangles[:, 1] - triangles[:, 0]
    v = triangles[:, 2] - triangles[:, 0]
    return 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])


def _clip_polygon(poly: List[np.ndarray], normal: np.ndarray, offset: float) -> List[np.ndarray]:
    out: List[np.ndarray] = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = float(normal @ p - offset)
        fq = float(normal @ q - offset)
        if fp <= 0.0:
            out.append(p)
        if (fp < 0.0 < fq) or (fq < 0.0 < fp):
            out.append(p + (fp / (fp - fq)) * (q - p))
    return out


class TwoChain:
    """Planar triangle soup; boundary is the mod-2 sum of triangle edges."""

    __slots__ = ("_triangles",)

    def __init__(self, triangles=()):
        arr = np.asarray(triangles, dtype=float)
        if arr.size == 0:
            arr = np.empty((0, 3, 2))
        if arr.shape[1:] != (3, 2):
            raise ValueError("TwoChain is planar: triangles must have shape (t, 3, 2)")
        arr = arr[_areas(arr) > eps_geom() ** 2]
        arr.setflags(write=False)
        self._triangles = arr

    @property
    def triangles(self) -> np.ndarray:
        return self._triangles

    @property
    def mass(self) -> float:
        return float(_areas(self._triangles).sum())

    @property
    def is_empty(self) -> bool:
        return len(self._triangles) == 0

    def __len__(self) -> int:
        return len(self._triangles)

    def __add__(self, other: "TwoChain") -> "TwoChain":
        return TwoChain(np.concatenate([self._triangles, other._triangles]))

    def boundary(self) -> OneChain:
        if self.is_empty:
            return OneChain.empty(2)
        t = self._triangles
        edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return OneChain(edges)

    def clip(self, polygon: ConvexPolytope) -> "TwoChain":
        pieces = []
        for tri in self._triangles:
            poly = [tri[0], tri[1], tri[2]]
            for normal, offset in zip(polygon.normals, polygon.offsets):
                poly = _clip_polygon(poly, normal, offset)
                if len(poly) < 3:
                    break
            for k in range(1, len(poly) - 1):
                pieces.append((poly[0], poly[k], poly[k + 1]))
        return TwoChain(pieces)

    @classmethod
    def cone(cls, cycle: OneChain, apex) -> "TwoChain":
        apex = np.asarray(apex, dtype=float)
        if cycle.is_empty:
            return cls()
        segs = cycle.segments
        tris = np.concatenate([np.broadcast_to(apex, (len(segs), 1, 2)), segs], axis=1)
        return cls(tris)
