import os
from functools import lru_cache

from core.errors import ConfigError

ENV_VAR = "CHAINFORGE_EPS_GEOM"
DEFAULT_EPS_GEOM = 1e-9


@lru_cache(maxsize=8)
def _parse(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as e:
        raise ConfigError(f"{ENV_VAR} is not a number: {raw!r}") from e
    if not 0.0 < value < 1e-3:
        raise ConfigError(f"{ENV_VAR} out of range: {value}")
    return value


def eps_geom() -> float:
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_EPS_GEOM
    return _parse(raw)
