import logging
from abc import ABC, abstractmethod
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np

from core.errors import ChainforgeError
from core.seeds import task_rng


class CheckViolation(ChainforgeError):
    """A property check found counterexamples."""


class CheckResult:
    def __init__(self, check_name: str):
        self.check_name = check_name
        self.status = "pending"
        self.message = ""
        self.details = ""
        self.start_time: Optional[datetime] = None
        self.end_time: Optional[datetime] = None
        self.logs = []
        self.metrics: Dict[str, Any] = {}

    def mark_started(self):
        self.start_time = datetime.now()
        self.status = "running"

    def mark_passed(self, message: str = "Check passed"):
        self.status = "passed"
        self.message = message
        self.end_time = datetime.now()

    def mark_failed(self, message: str, details: str = ""):
        self.status = "failed"
        self.message = message
        self.details = details
        self.end_time = datetime.now()

    def mark_skipped(self, reason: str):
        self.status = "skipped"
        self.message = reason
        self.end_time = datetime.now()

    def add_log(self, message: str):
        self.logs.append(f"{datetime.now().isoformat()}: {message}")

    def add_metric(self, name: str, value: Any):
        self.metrics[name] = value

    @property
    def duration(self) -> float:
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.check_name,
            "status": self.status,
            "message": self.message,
            "details": self.details,
            "duration": self.duration,
            "metrics": self.metrics,
            "logs": self.logs,
        }


def spread(values: Iterable[float]) -> float:
    """max/min over the positive values; 1 when there are none."""
    positive = [float(v) for v in values if v > 0]
    if not positive:
        return 1.0
    return max(positive) / min(positive)


class BaseCheck(ABC):
    def __init__(self, config: Dict[str, Any], artifacts_dir: Path):
        self.config = config
        self.artifacts_dir = artifacts_dir
        self.result = CheckResult(self.get_name())
        self.logger = logging.getLogger(self.get_name())
        self.timeout = config.get("timeout", 300)
        self.seed = int(config.get("seed", 0))
        self.params = config.get("params", {}) or {}

    @abstractmethod
    def get_name(self) -> str:
        pass

    @abstractmethod
    def get_description(self) -> str:
        pass

    @abstractmethod
    def check(self) -> str:
        """Run the property; return a summary line or raise CheckViolation."""

    def run(self) -> CheckResult:
        self.result.mark_started()

        try:
            message = self.check()
            self.result.mark_passed(message)
        except ChainforgeError as e:
            self.logger.error(f"{self.get_name()} failed: {e}")
            self.result.mark_failed(str(e), type(e).__name__)
            return self.result

        if self.result.duration > self.timeout:
            self.result.mark_failed(
                f"took {self.result.duration:.1f}s, limit {self.timeout}s", message
            )
        return self.result

    def param(self, name: str, default: Any = None) -> Any:
        return self.params.get(name, default)

    def rng(self, *key) -> np.random.Generator:
        return task_rng(self.seed, self.get_name(), *key)

    def expect_none(self, violations: int, what: str, trials: int):
        self.result.add_metric("trials", trials)
        self.result.add_metric("violations", violations)
        if violations:
            raise CheckViolation(f"{violations}/{trials} {what}")

    def expect_stable(self, name: str, values: Iterable[float], factor: float = 2.0):
        values = [float(v) for v in values]
        ratio = spread(values)
        self.result.add_metric(name, values)
        self.result.add_metric(f"{name}_spread", ratio)
        self.result.add_log(f"{name}: {values} (spread {ratio:.3g})")
        if ratio > factor:
            raise CheckViolation(f"{name} varies by {ratio:.3g}x, more than {factor}x: {values}")
