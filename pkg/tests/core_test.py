import numpy as np
import pytest

from chains import OneChain, ZeroChain
from core.config_loader import ConfigLoader, ExperimentConfig
from core.errors import BadSpec, ConfigError
from core.generators import FamilySpec, generate_family
from core.seeds import task_rng, task_seed
from core.serialization import (
    chain_from_dict,
    chain_to_dict,
    family_from_dict,
    family_to_dict,
    payload_hash,
    read_family,
    to_jsonable,
    write_family,
)


def test_task_seeds_depend_on_master_and_key():
    assert task_seed(0, "fill-disk", 0.1) == task_seed(0, "fill-disk", 0.1)
    assert task_seed(0, "fill-disk", 0.1) != task_seed(0, "fill-disk", 0.2)
    assert task_seed(0, "a") != task_seed(1, "a")
    assert task_rng(5, "x").uniform() == task_rng(5, "x").uniform()
    with pytest.raises(ValueError):
        task_seed(-1, "a")


def test_floats_are_rounded_for_hashing():
    assert to_jsonable(1.0 + 1e-15) == 1.0
    assert to_jsonable(float("nan")) == "nan"
    assert to_jsonable({"a": np.int64(3), "b": (np.float64(0.5),)}) == {"a": 3, "b": [0.5]}
    assert payload_hash({"a": 1, "b": 2}) == payload_hash({"b": 2, "a": 1})
    assert payload_hash({"a": 1.0}) == payload_hash({"a": 1.0 + 1e-15})


def test_chain_json():
    seg = OneChain([[[0.0, 0.0], [0.5, 0.5]]], dim=2)
    assert chain_from_dict(chain_to_dict(seg)) == seg
    pts = ZeroChain([[0.25, 0.5]], dim=2)
    assert chain_from_dict(chain_to_dict(pts)) == pts
    assert chain_to_dict(seg) == {"dim": 2, "one": [[[0.0, 0.0], [0.5, 0.5]]]}
    assert chain_to_dict(pts) == {"dim": 2, "zero": [[0.25, 0.5]]}
    both = {"dim": 2, "zero": [], "one": [[[0.0, 0.0], [0.5, 0.5]]]}
    assert chain_from_dict(both) == seg
    assert chain_from_dict({"dim": 3, "one": []}) == OneChain.empty(3)
    mixed = {"dim": 2, "zero": [[0, 0]], "one": [[[0, 0], [1, 1]]]}
    for bad in ({"dim": 2}, {"zero": [[0.0, 0.0]]}, mixed, {"dim": 2, "zero": [[0.0, "x"]]}):
        with pytest.raises(BadSpec):
            chain_from_dict(bad)


def test_family_file_round_trip(tmp_path):
    F = generate_family({"kind": "drifting", "points": 3, "d": 2, "q": 2, "drift": 0.05}, seed=1)
    path = tmp_path / "family.json"
    write_family(F, path)
    G = read_family(path)
    assert G.complex == F.complex
    assert all(G[v] == F[v] for v in F.vertices())


def test_family_json_must_cover_every_vertex():
    data = family_to_dict(generate_family({"points": 2, "q": 2}, seed=0))
    data["values"].pop("1")
    with pytest.raises(BadSpec):
        family_from_dict(data)
    with pytest.raises(BadSpec):
        read_family("/nonexistent/family.json")


def test_generated_families_are_reproducible():
    spec = {"kind": "boundary-crossing", "n": 3, "points": 5, "crossing": 2, "q": 4}
    a, b = generate_family(spec, seed=9), generate_family(spec, seed=9)
    assert all(a[v] == b[v] for v in a.vertices())
    assert any(not a[v] == generate_family(spec, seed=10)[v] for v in a.vertices())


def test_generated_values_lie_in_the_domain():
    F = generate_family({"kind": "sweepout", "domain": "square", "points": 4, "d": 2, "q": 2},
                        seed=2)
    for v in F.vertices():
        pts = F[v].points
        assert F[v].mass == 4
        assert np.all(pts >= -1e-9) and np.all(pts <= 1 + 1e-9)


def test_empty_family():
    F = generate_family({"points": 0, "q": 3}, seed=0)
    assert len(F.vertices()) == 4
    assert all(F[v].is_empty for v in F.vertices())


@pytest.mark.parametrize("bad", [
    {"kind": "wobbly"},
    {"n": 4},
    {"colour": "red"},
    {"kind": "sweepout", "points": 3},
    {"domain": "square", "n": 3},
    {"drift": 0.5},
    {"kind": "boundary-crossing", "points": 2, "crossing": 3},
])
def test_bad_family_specs(bad):
    with pytest.raises(BadSpec):
        FamilySpec.from_dict(bad)


def test_sweep_points_are_a_product():
    config = ExperimentConfig.from_mapping(
        {"id": "fill-disk", "sweep": {"r": [0.1, 0.2], "p": [4, 16]}}, seed=3
    )
    assert config.seed == 3
    assert config.sweep_points() == [
        {"p": 4, "r": 0.1}, {"p": 4, "r": 0.2}, {"p": 16, "r": 0.1}, {"p": 16, "r": 0.2},
    ]
    assert ExperimentConfig.from_mapping({"id": "flatnorm"}).sweep_points() == [{}]


@pytest.mark.parametrize("section", [
    {"id": "teleport"},
    {"id": "fill-disk", "sweep": {"seed": [1, 2]}},
    {"id": "fill-disk", "sweep": {"r": []}},
    {"id": "flatnorm", "ambient_dim": 2, "generator": {"n": 3}},
    {"generator": {}},
])
def test_bad_pipeline_sections(section):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(section)


def test_config_loader(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "seed: 4\nthreads: 2\npipeline:\n  id: flatnorm\n  params:\n    mode: relative\n"
    )
    loader = ConfigLoader(path)
    config = loader.experiment()
    assert config.seed == 4
    assert config.threads == 2
    assert config.param("mode") == "relative"
    assert loader.experiment(seed=8).seed == 8


def test_config_loader_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("pipeline: [unclosed\n")
    with pytest.raises(ConfigError):
        ConfigLoader(bad)
    suite = tmp_path / "suite.yaml"
    suite.write_text("suite_name: only checks\nchecks: []\n")
    with pytest.raises(ConfigError):
        ConfigLoader(suite).experiment()
    with pytest.raises(ConfigError):
        ConfigLoader(tmp_path / "missing.yaml")
