import yaml
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from core.errors import ConfigError
from core.generators import FamilySpec

PIPELINES = ("flatnorm", "localize", "fill-small", "fill-disk", "avoid-ball", "fill-domain")
SWEEPABLE = ("r", "delta", "eps", "L", "p")


@dataclass(frozen=True)
class ExperimentConfig:
    pipeline: str
    n: int = 2
    generator: FamilySpec = field(default_factory=FamilySpec)
    seed: int = 0
    eps: float = 0.05
    delta: float = 0.5
    r: float = 0.25
    L: float = 0.3
    p: int = 4
    sweep: Tuple[Tuple[str, Tuple[float, ...]], ...] = ()
    params: Tuple[Tuple[str, Any], ...] = ()
    threads: int = 1
    inject_fault: bool = False
    out: str = "chainforge_out"

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"unknown pipeline {self.pipeline!r}; expected one of {PIPELINES}")
        for name, values in self.sweep:
            if name not in SWEEPABLE:
                raise ConfigError(f"cannot sweep {name!r}; sweepable: {SWEEPABLE}")
            if not values:
                raise ConfigError(f"empty sweep for {name!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")
        if self.generator.n != self.n:
            raise ConfigError(f"generator dimension {self.generator.n} "
                              f"!= ambient dimension {self.n}")

    @classmethod
    def from_mapping(cls, data: Dict[str, Any], **overrides) -> "ExperimentConfig":
        if not isinstance(data, dict) or "id" not in data:
            raise ConfigError("pipeline section must be a mapping with an 'id'")
        n = int(data.get("ambient_dim", 2))
        generator = dict(data.get("generator", {}))
        generator.setdefault("n", n)
        sweep = tuple((str(k), tuple(v if isinstance(v, list) else [v]))
                      for k, v in sorted(dict(data.get("sweep", {})).items()))
        params = tuple(sorted(dict(data.get("params", {})).items()))
        try:
            config = cls(
                pipeline=str(data["id"]),
                n=n,
                generator=FamilySpec.from_dict(generator),
                eps=float(data.get("eps", 0.05)),
                delta=float(data.get("delta", 0.5)),
                r=float(data.get("r", 0.25)),
                L=float(data.get("L", 0.3)),
                p=int(data.get("p", 4)),
                sweep=sweep,
                params=params,
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad pipeline section: {e}") from e
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(config, **overrides) if overrides else config

    def param(self, name: str, default: Any = None) -> Any:
        return dict(self.params).get(name, default)

    def sweep_points(self):
        """One override dict per sweep point, in a fixed order."""
        points = [{}]
        for name, values in self.sweep:
            points = [dict(p, **{name: v}) for p in points for v in values]
        return points

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["generator"] = self.generator.to_dict()
        out["sweep"] = {k: list(v) for k, v in self.sweep}
        out["params"] = dict(self.params)
        return out


class ConfigLoader:
    def __init__(self, config_path: Path):
        self.config_path = config_path
        self.config = self._load()

    def _load(self) -> Dict[str, Any]:
        try:
            with open(self.config_path, 'r') as f:
                data = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"cannot read {self.config_path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"malformed YAML in {self.config_path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{self.config_path} must hold a mapping")
        return data

    @property
    def suite_name(self) -> str:
        return self.config.get("suite_name", "chainforge")

    @property
    def checks(self) -> list:
        return self.config.get("checks", [])

    @property
    def artifacts_dir(self) -> str:
        return self.config.get("artifacts_dir", "chainforge_out")

    @property
    def reporting(self) -> Dict[str, Any]:
        return self.config.get("reporting", {})

    @property
    def global_timeout(self) -> int:
        return self.config.get("global_timeout", 300)

    @property
    def seed(self) -> int:
        return int(self.config.get("seed", 0))

    @property
    def threads(self) -> int:
        return int(self.config.get("threads", 1))

    @property
    def inject_fault(self) -> bool:
        return bool(self.config.get("inject_fault", False))

    @property
    def pipeline(self) -> Optional[Dict[str, Any]]:
        return self.config.get("pipeline")

    def get_check_config(self, index: int) -> Dict[str, Any]:
        checks = self.checks
        if 0 <= index < len(checks):
            return checks[index]
        return {}

    def experiment(self, **overrides) -> ExperimentConfig:
        if self.pipeline is None:
            raise ConfigError(f"{self.config_path} has no pipeline section")
        base = {"seed": self.seed, "threads": self.threads, "inject_fault": self.inject_fault,
                "out": self.artifacts_dir}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.from_mapping(self.pipeline, **base)
