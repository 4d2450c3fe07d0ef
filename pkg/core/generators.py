"""Deterministic families of 0-chains on cubical parameter complexes."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Union

import numpy as np

from chains import SOUTH_POLE_3D, south_pole
from chains.regions import Ball, Box, ConvexPolygon, Region, unit_disk
from chains.zero import ZeroChain
from coarea.cover import sample_domain
from cubical.complex import CubicalComplex
from cubical.family import VertexMap
from core.errors import BadSpec
from core.seeds import task_rng

logger = logging.getLogger("Generators")

STATIC = "static"
DRIFTING = "drifting"
CROSSING = "boundary-crossing"
SWEEPOUT = "sweepout"
KINDS = (STATIC, DRIFTING, CROSSING, SWEEPOUT)

MARGIN = 0.05


@dataclass(frozen=True)
class FamilySpec:
    kind: str = STATIC
    n: int = 2
    points: int = 10
    clusters: int = 1
    spread: float = 0.1
    domain: str = "disk"
    d: int = 1
    q: int = 4
    drift: float = 0.2
    crossing: int = 1

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FamilySpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise BadSpec(f"unknown generator fields: {sorted(unknown)}")
        try:
            spec = cls(**dict(data))
        except TypeError as e:
            raise BadSpec(f"bad generator spec: {e}") from e
        return spec.validate()

    def validate(self) -> "FamilySpec":
        if self.kind not in KINDS:
            raise BadSpec(f"generator kind must be one of {KINDS}, got {self.kind!r}")
        if self.n not in (2, 3):
            raise BadSpec(f"ambient dimension must be 2 or 3, got {self.n}")
        if self.points < 0 or self.clusters < 1 or self.d < 1 or self.q < 1:
            raise BadSpec("points must be >= 0; clusters, d and q must be >= 1")
        if self.domain not in ("disk", "square"):
            raise BadSpec(f"domain must be 'disk' or 'square', got {self.domain!r}")
        if self.domain == "square" and self.n != 2:
            raise BadSpec("the square domain is planar")
        if not 0.0 <= self.drift < 0.5:
            raise BadSpec(f"drift must lie in [0, 0.5), got {self.drift}")
        if self.kind == CROSSING and not 0 <= self.crossing <= self.points:
            raise BadSpec(f"crossing count {self.crossing} outside [0, {self.points}]")
        if self.kind == SWEEPOUT and self.points % 2:
            raise BadSpec(f"sweepout slices need an even point count, got {self.points}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def spec_region(spec: FamilySpec) -> Region:
    if spec.domain == "square":
        return ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    return unit_disk(spec.n)


def _shrunk(spec: FamilySpec, by: float) -> Region:
    if spec.domain == "square":
        return Box([by, by], [1.0 - by, 1.0 - by])
    return Ball(np.zeros(spec.n), 1.0 - by)


def _cloud(spec: FamilySpec, rng: np.random.Generator, count: int, by: float) -> np.ndarray:
    if count == 0:
        return np.empty((0, spec.n))
    region = _shrunk(spec, by)
    centers = sample_domain(region, spec.clusters, rng)
    out = []
    for i in range(count):
        center = centers[i % spec.clusters]
        for _ in range(100):
            x = center + spec.spread * rng.normal(size=spec.n)
            if region.contains_point(x):
                break
        else:
            x = center
        out.append(x)
    return np.asarray(out)


def _drift_vectors(spec: FamilySpec, rng: np.random.Generator) -> np.ndarray:
    u = rng.normal(size=(spec.d, spec.n))
    return spec.drift * u / np.linalg.norm(u, axis=1)[:, None]


def _static(spec, complex, rng):
    z = ZeroChain(_cloud(spec, rng, spec.points, MARGIN), dim=spec.n)
    return {v: z for v in complex.vertices()}


def _drifting(spec, complex, rng):
    cloud = _cloud(spec, rng, spec.points, MARGIN + spec.drift * spec.d)
    moves = _drift_vectors(spec, rng)
    values = {}
    for v in complex.vertices():
        x = np.asarray(complex.point(v))
        values[v] = ZeroChain(cloud + x @ moves, dim=spec.n)
    return values


def _crossing(spec, complex, rng):
    """Interior cloud plus points that run out to the sphere near the south pole and slide."""
    e = np.asarray(SOUTH_POLE_3D if spec.n == 3 else south_pole(spec.n), dtype=float)
    static = _cloud(spec, rng, spec.points - spec.crossing, MARGIN)
    static = static[static @ e < 0.3] if len(static) else static
    tangents = []
    for _ in range(spec.crossing):
        t = rng.normal(size=spec.n)
        t -= (t @ e) * e
        tangents.append(t / np.linalg.norm(t))
    sweep = rng.uniform(0.15, 0.35, spec.crossing)
    values = {}
    for v in complex.vertices():
        s = complex.point(v)[0]
        movers = []
        for tangent, theta in zip(tangents, sweep):
            angle = theta * (2.0 * s - 1.0)
            radius = min(1.0, 0.7 + 0.6 * s)
            movers.append(radius * (math.cos(angle) * e + math.sin(angle) * tangent))
        pts = np.vstack([static, np.asarray(movers).reshape(-1, spec.n)])
        values[v] = ZeroChain(pts, dim=spec.n)
    return values


def _sweepout(spec, complex, rng):
    if spec.n != 2:
        raise BadSpec("sweepout slices are planar")
    region = spec_region(spec)
    center = region.vertices.mean(axis=0) if isinstance(region, ConvexPolygon) else np.zeros(2)
    fractions = np.sort(rng.uniform(0.02, 0.98, spec.points))
    base_angle = rng.uniform(0.0, math.pi)
    values = {}
    for v in complex.vertices():
        x = complex.point(v)
        angle = base_angle + (math.pi / 4.0 * x[1] if len(x) > 1 else 0.0)
        d = np.array([math.cos(angle), math.sin(angle)])
        tangent = np.array([-d[1], d[0]])
        if isinstance(region, ConvexPolygon):
            levels = (region.vertices - center) @ d
            lo, hi = float(levels.min()), float(levels.max())
        else:
            lo, hi = -1.0, 1.0
        level = lo + (hi - lo) * (MARGIN + (1.0 - 2.0 * MARGIN) * x[0])
        base = center + level * d
        a, b = region.line_interval(base, base + tangent)
        values[v] = ZeroChain(base + np.outer(a + fractions * (b - a), tangent), dim=2)
    return values


BUILDERS = {STATIC: _static, DRIFTING: _drifting, CROSSING: _crossing, SWEEPOUT: _sweepout}


def generate_family(spec: Union[FamilySpec, Mapping[str, Any]], seed: int) -> VertexMap:
    """Family on the grid I^d(q); the same (spec, seed) always gives the same values."""
    if not isinstance(spec, FamilySpec):
        spec = FamilySpec.from_dict(spec)
    else:
        spec.validate()
    complex = CubicalComplex.grid(spec.d, spec.q)
    if spec.points == 0:
        empty = ZeroChain.empty(spec.n)
        return VertexMap(complex, {v: empty for v in complex.vertices()}, f"{spec.kind}(empty)")
    rng = task_rng(seed, "family", spec.kind)
    values = BUILDERS[spec.kind](spec, complex, rng)
    logger.debug(f"generated {spec.kind} family: {len(values)} vertices, {spec.points} points")
    return VertexMap(complex, values, f"{spec.kind}(seed={seed})")
