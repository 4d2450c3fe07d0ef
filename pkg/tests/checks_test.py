import json

import pytest

from checks.base_check import BaseCheck, CheckViolation, spread
from checks.construction.hyperplane_check import HyperplaneCheck
from checks.kernel.admissible_check import AdmissibleAlgebraCheck
from checks.kernel.coarea_check import CoareaSelectionCheck
from checks.kernel.flat_norm_check import FlatNormOracleCheck
from core import cli
from core.config_loader import ConfigLoader
from core.errors import EXIT_ASSERTION, EXIT_PASS
from core.runner import CheckRunner


class CountingCheck(BaseCheck):
    def get_name(self) -> str:
        return "counting"

    def get_description(self) -> str:
        return "Counts to a limit"

    def check(self) -> str:
        found = int(self.param("violations", 0))
        self.expect_none(found, "counted violations", 10)
        return "nothing found"


def test_spread_ignores_zeros():
    assert spread([]) == 1.0
    assert spread([0.0, 2.0, 4.0]) == 2.0
    assert spread([0.0, 0.0]) == 1.0


def test_check_passes_and_records_metrics(tmp_path):
    result = CountingCheck({}, tmp_path).run()
    assert result.status == "passed"
    assert result.metrics == {"trials": 10, "violations": 0}
    assert result.to_dict()["message"] == "nothing found"


def test_check_violation_fails_the_result(tmp_path):
    result = CountingCheck({"params": {"violations": 3}}, tmp_path).run()
    assert result.status == "failed"
    assert result.details == "CheckViolation"
    assert "3/10" in result.message


def test_slow_check_fails_on_timeout(tmp_path):
    result = CountingCheck({"timeout": -1}, tmp_path).run()
    assert result.status == "failed"
    assert "limit" in result.message


def test_unstable_constants_are_rejected(tmp_path):
    check = CountingCheck({}, tmp_path)
    check.expect_stable("C", [1.0, 1.5])
    with pytest.raises(CheckViolation):
        check.expect_stable("C", [1.0, 3.0])


def test_check_streams_depend_on_seed(tmp_path):
    a = CountingCheck({"seed": 1}, tmp_path).rng("x").uniform()
    b = CountingCheck({"seed": 1}, tmp_path).rng("x").uniform()
    c = CountingCheck({"seed": 2}, tmp_path).rng("x").uniform()
    assert a == b != c


@pytest.mark.parametrize("check_class, params", [
    (FlatNormOracleCheck, {"cycles": 20, "max_points": 6}),
    (CoareaSelectionCheck, {"pairs": 5}),
    (AdmissibleAlgebraCheck, {"families": 20, "complexes": 2}),
    (HyperplaneCheck, {"families": 10, "polygons": 10, "bisection_trials": 4, "fraction": 0.1}),
])
def test_checks_pass_on_small_sizes(tmp_path, check_class, params):
    result = check_class({"seed": 0, "params": params}, tmp_path).run()
    assert result.status == "passed", result.message


def write_suite(tmp_path):
    path = tmp_path / "suite.yaml"
    path.write_text(
        "suite_name: small\n"
        f"artifacts_dir: {tmp_path / 'artifacts'}\n"
        "seed: 0\n"
        "checks:\n"
        "  - module: checks.kernel.coarea_check.CoareaSelectionCheck\n"
        "    params: {pairs: 3}\n"
        "  - module: checks.kernel.nowhere.MissingCheck\n"
        "  - module: checks.kernel.chop_check.ChopStabilityCheck\n"
        "    enabled: false\n"
    )
    return path


def test_runner_loads_and_skips_checks(tmp_path):
    runner = CheckRunner(ConfigLoader(write_suite(tmp_path)))
    results = runner.run_all_checks()
    assert [r.status for r in results] == ["passed", "failed"]
    assert results[1].message == "Failed to load check module"
    assert runner.summary["total"] == 2
    assert runner.summary["success_rate"] == 50.0
    assert runner.artifacts_dir.name.startswith("run_")


def test_suite_exit_code_and_report(tmp_path):
    path = write_suite(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(path), "--out", str(out)]) == EXIT_ASSERTION
    (run_dir,) = out.iterdir()
    report = json.loads((run_dir / "suite_report.json").read_text())
    assert report["suite"] == "small"
    assert report["summary"]["failed"] == 1


def test_passing_suite(tmp_path):
    path = tmp_path / "pass.yaml"
    path.write_text(
        "checks:\n"
        "  - module: checks.kernel.coarea_check.CoareaSelectionCheck\n"
        "    params: {pairs: 2}\n"
    )
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_PASS
