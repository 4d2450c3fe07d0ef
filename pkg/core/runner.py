import importlib
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from core.config_loader import ConfigLoader
from core.reporter import summarize
from checks.base_check import BaseCheck, CheckResult


class CheckRunner:
    def __init__(self, config_loader: ConfigLoader, seed: Optional[int] = None,
                 artifacts_dir: Optional[Path] = None):
        self.config = config_loader
        self.seed = config_loader.seed if seed is None else seed
        self.logger = logging.getLogger("CheckRunner")
        self.results: List[CheckResult] = []
        self.artifacts_dir = self._setup_artifacts_dir(artifacts_dir)

    def _setup_artifacts_dir(self, override: Optional[Path]) -> Path:
        base_dir = Path(override or self.config.artifacts_dir).expanduser()
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        run_dir = base_dir / f"run_{timestamp}"
        run_dir.mkdir(parents=True, exist_ok=True)
        return run_dir

    def _load_check_class(self, module_path: str):
        try:
            module_name, class_name = module_path.rsplit(".", 1)
            module = importlib.import_module(module_name)
            return getattr(module, class_name)
        except Exception as e:
            self.logger.error(f"Failed to load check {module_path}: {e}")
            return None

    def run_all_checks(self) -> List[CheckResult]:
        for check_config in self.config.checks:
            if not check_config.get("enabled", True):
                self.logger.info(f"Skipping disabled check: {check_config.get('module')}")
                continue

            result = self._run_single_check(check_config)
            self.logger.info(f"{result.check_name}: {result.status.upper()} - {result.message}")
            self.results.append(result)

        return self.results

    def _run_single_check(self, check_config: dict) -> CheckResult:
        module_path = check_config.get("module")
        check_class = self._load_check_class(module_path)

        if not check_class:
            result = CheckResult(module_path)
            result.mark_failed("Failed to load check module")
            return result

        check_config = dict(check_config)
        check_config.setdefault("seed", self.seed)
        check_config.setdefault("timeout", self.config.global_timeout)
        try:
            check: BaseCheck = check_class(check_config, self.artifacts_dir)
            self.logger.info(f"Running: {check.get_description()}")
            return check.run()
        except Exception as e:
            self.logger.error(f"Check crashed: {e}")
            result = CheckResult(module_path)
            result.mark_failed("Check crashed", str(e))
            return result

    @property
    def summary(self) -> dict:
        return summarize(self.results)
