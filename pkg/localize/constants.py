"""Recursive constants of the localization and small-filling constructions."""

from __future__ import annotations

from functools import lru_cache

DELTA_MAX = 2.0


def coverage_radius(delta: float, p: int) -> float:
    return delta / (8.0 * (2 * max(p, 1) - 1))


@lru_cache(maxsize=None)
def localization_constant(N: int, k: int, j: int) -> int:
    if j <= 1:
        return 12
    inner = localization_constant(N, k, j - 1)
    k1 = localization_constant(inner, k + 1, j - 1) * inner
    k2 = 12 * (k1 + 1)
    return 3 * (k2 + 1)


@lru_cache(maxsize=None)
def mass_constant(k: int, j: int) -> int:
    if j <= 1:
        return 18
    return 9 * mass_constant(k, j - 1) ** 2


@lru_cache(maxsize=None)
def mass_exponent(k: int, j: int) -> int:
    if j <= 1:
        return 1
    return 2 * mass_exponent(k, j - 1) + 1


@lru_cache(maxsize=None)
def cone_constant(p: int) -> int:
    if p <= 0:
        return 1
    return 3 * cone_constant(p - 1) + 4


def mass_bound(k: int, p: int, L: int, delta: float, eps: float) -> float:
    return mass_constant(k, p) * (L / delta) ** mass_exponent(k, p) * eps
