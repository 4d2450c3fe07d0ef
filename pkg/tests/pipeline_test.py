import csv
import json

import numpy as np
import pytest

from core import cli
from core.config_loader import ExperimentConfig
from core.errors import EXIT_ASSERTION, EXIT_CONFIG, EXIT_PASS
from core.generators import generate_family
from core.pipeline import run_pipeline
from core.reporter import Reporter
from core.serialization import read_family, write_family


def experiment(section, **overrides):
    return ExperimentConfig.from_mapping(section, **overrides)


FLATNORM = {"id": "flatnorm", "generator": {"kind": "drifting", "points": 6, "q": 3}}
FILL_DISK = {
    "id": "fill-disk",
    "generator": {"kind": "static", "points": 6, "q": 1},
    "sweep": {"r": [0.2, 0.25, 0.3]},
}


def test_empty_family_passes():
    report = run_pipeline(experiment({"id": "flatnorm", "generator": {"points": 0, "q": 2}}))
    assert report.passed
    assert report.exit_code == EXIT_PASS
    assert len(report.rows) == 3


def test_flatnorm_matches_oracle():
    report = run_pipeline(experiment(FLATNORM))
    assert report.asserts == {"flat_witness": True, "flat_oracle": True}
    assert report.ratio_max == pytest.approx(1.0)
    assert report.blocks[0].constants["oracle_gap"] <= 1e-9


def test_injected_fault_fails_the_run():
    report = run_pipeline(experiment(FLATNORM, inject_fault=True))
    assert not report.asserts["flat_witness"]
    assert report.exit_code == EXIT_ASSERTION
    assert report.blocks[0].messages


def test_fill_disk_sweep_gives_one_block_per_width():
    report = run_pipeline(experiment(FILL_DISK))
    assert [b.sweep for b in report.blocks] == [{"r": 0.2}, {"r": 0.25}, {"r": 0.3}]
    assert report.passed
    assert {row["r"] for row in report.rows} == {0.2, 0.25, 0.3}
    assert all(b.constants["C"] > 0 for b in report.blocks)


def test_report_hash_ignores_threads():
    one = run_pipeline(experiment(FILL_DISK, threads=1))
    three = run_pipeline(experiment(FILL_DISK, threads=3))
    assert one.report_hash == three.report_hash
    assert one.report_hash != run_pipeline(experiment(FILL_DISK, seed=1)).report_hash


def test_fill_disk_fault_breaks_the_boundary():
    report = run_pipeline(experiment(FILL_DISK, inject_fault=True))
    assert not report.asserts["bend_cancel_boundary"]
    assert report.blocks[1].asserts == {}


def test_reporter_writes_every_artifact(tmp_path):
    report = run_pipeline(experiment(FLATNORM))
    paths = Reporter(tmp_path).generate_all_reports(report)
    summary = json.loads(paths["summary"].read_text())
    assert summary["passed"] is True
    assert summary["report_hash"] == report.report_hash
    lines = paths["rows"].read_text().splitlines()
    assert len(lines) == len(report.rows)
    assert json.loads(lines[0])["pipeline"] == "flatnorm"
    with open(paths["csv"]) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["x_index", "mass", "bound"]
    assert len(rows) == len(report.rows) + 1
    assert "Status: PASSED" in paths["text"].read_text()


def test_rows_are_appended(tmp_path):
    report = run_pipeline(experiment(FLATNORM))
    reporter = Reporter(tmp_path)
    reporter.write_rows(report)
    path = reporter.write_rows(report)
    assert len(path.read_text().splitlines()) == 2 * len(report.rows)


class FakeResponse:
    def __init__(self, status_code):
        self.status_code = status_code


def test_summary_is_posted_with_bearer_token(tmp_path, monkeypatch):
    calls = []

    def post(url, json, headers, timeout):
        calls.append((url, json, headers, timeout))
        return FakeResponse(201)

    monkeypatch.setattr("core.reporter.requests.post", post)
    reporter = Reporter(tmp_path, {"api_endpoint": "http://results.invalid", "api_key": "k"})
    assert reporter.post_to_api({"passed": True})
    url, payload, headers, timeout = calls[0]
    assert url == "http://results.invalid"
    assert payload == {"passed": True}
    assert headers == {"Authorization": "Bearer k"}
    assert timeout == 30


def test_failed_post_is_only_logged(tmp_path, monkeypatch):
    def post(*args, **kwargs):
        raise ConnectionError("unreachable")

    monkeypatch.setattr("core.reporter.requests.post", post)
    assert not Reporter(tmp_path, {"api_endpoint": "http://results.invalid"}).post_to_api({})
    assert not Reporter(tmp_path).post_to_api({})


def test_cli_runs_a_pipeline(tmp_path):
    code = cli.main(["flatnorm", "--out", str(tmp_path), "--seed", "2"])
    assert code == EXIT_PASS
    assert (tmp_path / "flatnorm_summary.json").exists()
    assert (tmp_path / "flatnorm_bounds.csv").exists()


def test_cli_fault_exits_with_assertion_code(tmp_path):
    assert cli.main(["flatnorm", "--out", str(tmp_path), "--inject-fault"]) == EXIT_ASSERTION


def test_cli_config_errors(tmp_path):
    assert cli.main(["flatnorm", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG
    wrong = tmp_path / "localize.yaml"
    wrong.write_text("pipeline:\n  id: localize\n")
    assert cli.main(["flatnorm", "--config", str(wrong), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert cli.main(["localize", "--dim-cap", "0", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert cli.main(["run", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cli_generate_writes_a_family(tmp_path):
    config = tmp_path / "gen.yaml"
    config.write_text(
        "seed: 5\npipeline:\n  id: fill-domain\n"
        "  generator: {kind: sweepout, domain: square, points: 4, q: 2}\n"
    )
    assert cli.main(["generate", "--config", str(config), "--out", str(tmp_path)]) == EXIT_PASS
    F = read_family(tmp_path / "family_sweepout_5.json")
    assert len(F.vertices()) == 3


def test_cli_flatnorm_reads_a_chain(tmp_path):
    chain = tmp_path / "chain.json"
    chain.write_text(json.dumps({"dim": 2, "zero": [[0.1, 0.0], [0.3, 0.0]]}))
    assert cli.main(["flatnorm", "--input", str(chain), "--out", str(tmp_path)]) == EXIT_PASS
    witness = json.loads((tmp_path / "flatnorm_witness.json").read_text())
    assert witness["0"]["witness"]["value"] == pytest.approx(0.2)
    assert witness["0"]["beta"] == {"dim": 2, "one": [[[0.1, 0.0], [0.3, 0.0]]]}


def test_cli_localize_writes_the_refined_family(tmp_path):
    F = generate_family({"kind": "drifting", "points": 6, "drift": 0.01, "q": 2}, seed=0)
    write_family(F, tmp_path / "family.json")
    args = ["localize", "--input", str(tmp_path / "family.json"), "--out", str(tmp_path)]
    assert cli.main(args) == EXIT_PASS
    F_prime = read_family(tmp_path / "localize_family.json")
    assert len(F_prime.vertices()) > len(F.vertices())
    Q = F_prime.complex.q // F.complex.q
    assert all(F_prime[tuple(Q * x for x in v)] == F[v] for v in F.vertices())


@pytest.mark.parametrize("pipeline, spec", [
    ("fill-disk", {"kind": "static", "points": 4, "q": 1}),
    ("fill-domain", {"kind": "sweepout", "domain": "square", "points": 4, "q": 2}),
])
def test_cli_fill_reads_a_family_and_writes_fillings(tmp_path, pipeline, spec):
    F = generate_family(spec, seed=1)
    write_family(F, tmp_path / "family.json")
    args = [pipeline, "--input", str(tmp_path / "family.json"), "--out", str(tmp_path)]
    assert cli.main(args) == EXIT_PASS
    G = read_family(tmp_path / f"{pipeline}_fillings.json")
    assert G.complex == F.complex
    for v in F.vertices():
        rest = G[v].boundary() + F[v]
        if pipeline == "fill-domain":
            assert rest.is_empty
        else:
            assert np.allclose(np.linalg.norm(rest.points, axis=1), 1.0, atol=1e-6)


def test_cli_rejects_unusable_input(tmp_path):
    segment = tmp_path / "segment.json"
    segment.write_text(json.dumps({"dim": 2, "one": [[[0.0, 0.0], [0.5, 0.0]]]}))
    spatial = tmp_path / "spatial.json"
    spatial.write_text(json.dumps({"dim": 3, "zero": [[0.1, 0.0, 0.0]]}))
    out = ["--out", str(tmp_path)]
    assert cli.main(["flatnorm", "--input", str(segment)] + out) == EXIT_CONFIG
    assert cli.main(["flatnorm", "--input", str(spatial)] + out) == EXIT_CONFIG
    assert cli.main(["fill-disk", "--input", str(spatial)] + out) == EXIT_CONFIG
    assert cli.main(["flatnorm", "--input", str(tmp_path / "missing.json")] + out) == EXIT_CONFIG


def test_cli_unexpected_error_is_logged(tmp_path, monkeypatch):
    def broken(config, family=None):
        raise RuntimeError("worker died")

    monkeypatch.setattr(cli, "run_pipeline", broken)
    assert cli.main(["flatnorm", "--out", str(tmp_path)]) == EXIT_ASSERTION
