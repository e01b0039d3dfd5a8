"""Tests for config loading and the experiment runner."""
import json
import os

import pytest

from graphbandit.config import CONFIG_FORMAT_VERSION, NNE, STAGE_COLUMNS, TREE_MAX, TREE_MIN
from graphbandit.environment import NoiseModel
from graphbandit.exceptions import ExperimentError, ModelViolationError
from graphbandit.experiment import (
    ExperimentConfig,
    build_graph,
    load_config,
    repetition_seed,
    run_experiment,
)
from graphbandit.exporter import parse_curve_csv
from graphbandit.generators import erdos_renyi_connected, line_graph
from graphbandit.graph import write_edge_list


@pytest.fixture
def pac_config(tmp_path):
    """Small PAC experiment on a line of five nodes."""
    return ExperimentConfig(
        mode="pac",
        graph={"kind": "line", "n": 5},
        algorithms=["line", "tree", "nne"],
        epsilon=0.2,
        delta=0.1,
        repetitions=3,
        seed=7,
        output=str(tmp_path / "pac"),
    )


def _write_config(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


# Config Tests
def test_config_defaults():
    """Test the default config runs network elimination on the spider web."""
    config = ExperimentConfig()
    assert config.mode == "pac"
    assert config.graph == {"kind": "spider_web"}
    assert config.algorithms == ["nne"]
    assert config.repetitions == 200
    assert NoiseModel.parse(config.noise_model) is NoiseModel.PREFERENCE_SIGN


@pytest.mark.parametrize("overrides,message", [
    ({"mode": "bandit"}, "Invalid mode"),
    ({"repetitions": 0}, "repetitions"),
    ({"algorithms": []}, "At least one algorithm"),
    ({"algorithms": ["greedy"]}, "Invalid algorithm"),
    ({"mode": "curve", "algorithms": ["line"], "budgets": [10]}, "Invalid algorithm"),
    ({"mode": "curve"}, "at least one budget"),
    ({"mode": "curve", "budgets": [500, 100]}, "ascending"),
    ({"noise_model": "gaussian"}, "Unknown noise model"),
    ({"graph": {"n": 5}}, "'kind'"),
    ({"graph": {"edge_list": "/nonexistent/graph.txt"}}, "not found"),
    ({"epsilon": -1.0}, "epsilon"),
    ({"mode": "contextual", "context_pattern": "spiral"}, "context pattern"),
    ({"mode": "contextual", "horizon": "forever"}, "horizon"),
])
def test_config_validation(overrides, message):
    """Test invalid configs are rejected with a clear message."""
    with pytest.raises(ModelViolationError, match=message):
        ExperimentConfig(**overrides)


def test_load_config(tmp_path):
    """Test a versioned JSON config loads."""
    path = _write_config(tmp_path / "config.json", {
        "version": CONFIG_FORMAT_VERSION, "graph": {"kind": "line", "n": 4},
        "algorithms": ["line"], "repetitions": 2,
    })
    config = load_config(path)
    assert config.graph == {"kind": "line", "n": 4}
    assert config.repetitions == 2


def test_load_config_unknown_keys(tmp_path):
    """Test typos in config keys are reported."""
    path = _write_config(tmp_path / "config.json", {"repetitons": 2})
    with pytest.raises(ModelViolationError, match="Unknown config keys"):
        load_config(path)


def test_load_config_wrong_version(tmp_path):
    """Test configs of another format version are refused."""
    path = _write_config(tmp_path / "config.json", {"version": 99})
    with pytest.raises(ModelViolationError, match="Unsupported config version"):
        load_config(path)


def test_load_config_invalid_json(tmp_path):
    """Test unparsable files raise ExperimentError with the path."""
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ExperimentError) as excinfo:
        load_config(str(path))
    assert excinfo.value.path == str(path)


def test_load_config_relative_edge_list(tmp_path):
    """Test edge-list paths are resolved next to the config."""
    write_edge_list(line_graph(4), str(tmp_path / "line.txt"))
    path = _write_config(tmp_path / "config.json", {"graph": {"edge_list": "line.txt"},
                                                     "algorithms": ["line"]})
    config = load_config(path)
    assert os.path.isabs(config.graph["edge_list"])
    assert build_graph(config) == line_graph(4)


# Runner Tests
def test_repetition_seed():
    """Test repetition seeds are deterministic and distinct."""
    assert repetition_seed(3, 1) == repetition_seed(3, 1)
    assert len({repetition_seed(3, r) for r in range(100)}) == 100
    assert repetition_seed(3, 0) != repetition_seed(4, 0)


def test_seeded_graph_uses_master_seed():
    """Test random graph kinds default to the master seed."""
    config = ExperimentConfig(graph={"kind": "erdos_renyi", "n": 8, "p": 0.4}, seed=5)
    assert build_graph(config) == erdos_renyi_connected(8, 0.4, seed=5)


def test_run_pac_experiment(pac_config):
    """Test PAC rows, output files and the manifest."""
    outcome = run_experiment(pac_config)
    assert len(outcome.rows) == 9
    assert [r["algorithm"] for r in outcome.rows] == ["line"] * 3 + ["nne"] * 3 + ["tree"] * 3
    assert all(r["total_pulls"] > 0 for r in outcome.rows)
    assert os.path.isfile(outcome.paths["pac"])
    with open(outcome.paths["manifest"], encoding="utf-8") as f:
        manifest = json.load(f)
    assert manifest["format_version"] == CONFIG_FORMAT_VERSION
    assert manifest["config"]["seed"] == 7
    assert manifest["graph"]["edges"] == [[1, 2], [2, 3], [3, 4], [4, 5]]
    assert manifest["repetition_seeds"] == [repetition_seed(7, r) for r in range(3)]
    assert manifest["outputs"] == ["results.csv"]
    assert set(manifest["summary"]) == {"line", "nne", "tree"}


def test_run_pac_experiment_reproducible(pac_config, tmp_path):
    """Test rerunning a config reproduces its CSV byte for byte."""
    first = run_experiment(pac_config)
    second = run_experiment(pac_config, output_dir=str(tmp_path / "again"))
    with open(first.paths["pac"], "rb") as a, open(second.paths["pac"], "rb") as b:
        assert a.read() == b.read()


def test_run_experiment_reports_failed_repetition(tmp_path):
    """Test an algorithm that cannot run on the graph fails with its repetition."""
    config = ExperimentConfig(graph={"kind": "cycle", "n": 5}, algorithms=["line"],
                              repetitions=2, output=str(tmp_path))
    with pytest.raises(ExperimentError, match="line repetition 0") as excinfo:
        run_experiment(config)
    assert excinfo.value.repetition == 0


def test_run_curve_experiment(tmp_path):
    """Test curve points and the flagged zero budget."""
    config = ExperimentConfig(
        mode="curve",
        graph={"kind": "spider_web", "rings": 2, "nodes_per_ring": 4},
        noise_model="uniform_bounded",
        algorithms=["nne", "tree_min"],
        epsilon=0.0,
        budgets=[0, 2000],
        repetitions=3,
        output=str(tmp_path),
    )
    with pytest.warns(UserWarning, match="flagged"):
        outcome = run_experiment(config)
    assert [(p.algorithm, p.budget) for p in outcome.points] == [
        ("nne", 0), ("nne", 2000), ("tree_min", 0), ("tree_min", 2000),
    ]
    assert outcome.points[0].flagged
    assert not outcome.points[1].flagged
    with open(outcome.paths["curve"], encoding="utf-8") as f:
        assert parse_curve_csv(f.read()) == outcome.points
    assert outcome.rows == []


def test_run_contextual_experiment(tmp_path):
    """Test one row per stage and repetition with stage columns."""
    config = ExperimentConfig(
        mode="contextual",
        graph={"kind": "erdos_renyi", "n": 5, "p": 0.6},
        epsilon=0.2,
        delta=0.1,
        repetitions=2,
        dimension=2,
        stages=4,
        context_pattern="basis_cycle",
        output=str(tmp_path),
    )
    outcome = run_experiment(config)
    assert len(outcome.rows) == 8
    assert [r["stage"] for r in outcome.rows] == [1, 2, 3, 4] * 2
    for row in outcome.rows:
        assert set(STAGE_COLUMNS) <= set(row)
    final = outcome.rows[3]
    assert final["cumulative_pulls"] == sum(r["total_pulls"] for r in outcome.rows[:4])
    with open(outcome.paths["contextual"], encoding="utf-8") as f:
        assert f.readline().strip() == ",".join(STAGE_COLUMNS)


# Shipped Config Tests

CONFIGS_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs")


@pytest.mark.slow
def test_spider_web_curves_config(tmp_path):
    """Test the spider-web error curves at 200 repetitions."""
    config = load_config(os.path.join(CONFIGS_DIR, "spider_web_curves.json"))
    outcome = run_experiment(config, output_dir=str(tmp_path))
    curves = {}
    for point in outcome.points:
        assert not point.flagged
        curves.setdefault(point.algorithm, {})[point.budget] = point.error_rate
    assert set(curves) == {NNE, TREE_MIN, TREE_MAX}

    smallest, largest = config.budgets[0], config.budgets[-1]
    for algorithm, errors in curves.items():
        assert errors[largest] <= 0.15, algorithm
        assert errors[largest] < errors[smallest], algorithm
    assert curves[TREE_MIN][largest] <= curves[TREE_MAX][largest]
