"""Tests for configuration loading and record serialization."""
import json

import pytest

from comm_tool.core.config import Config, RunConfig, SolveConfig, SweepConfig
from comm_tool.core.exceptions import ConfigError
from comm_tool.core.records import TraceLine
from comm_tool.core.types import OutputFormat, Policy
from comm_tool.utils.serialization import dumps, read_coordinates, read_trace, render_trace, write_trace

ENV_VARS = ["COMM_TOL_A", "COMM_TOL_B", "COMM_MAX_ITER", "COMM_POLICY", "COMM_SEED",
            "COMM_REGULAR_DELTA", "COMM_VERIFY_TOL", "COMM_LOG_LEVEL", "COMM_LOG_DIR"]


@pytest.fixture
def clean_env(monkeypatch):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    config = Config.from_env()
    assert config.solve.tol_A == 1e-7
    assert config.solve.tol_B == 1e-8
    assert config.solve.max_iter == 500
    assert config.solve.policy == Policy.MAX_DECREASE
    assert config.solve.regular_delta == 1e-6
    assert config.logging.log_dir is None


def test_environment_overrides(clean_env, tmp_path):
    clean_env.setenv("COMM_TOL_B", "1e-10")
    clean_env.setenv("COMM_POLICY", "random")
    clean_env.setenv("COMM_LOG_DIR", str(tmp_path))
    config = Config.from_env()
    assert config.solve.tol_B == 1e-10
    assert config.solve.policy == Policy.RANDOM
    assert config.logging.log_dir == tmp_path


@pytest.mark.parametrize("name, value", [
    ("COMM_TOL_A", "-1"),
    ("COMM_MAX_ITER", "0"),
    ("COMM_REGULAR_DELTA", "1.5"),
    ("COMM_POLICY", "greedy"),
    ("COMM_SEED", "abc"),
])
def test_invalid_environment_raises_config_error(clean_env, name, value):
    clean_env.setenv(name, value)
    with pytest.raises(ConfigError):
        Config.from_env()


def test_sweep_config_is_frozen():
    cfg = SweepConfig()
    with pytest.raises(Exception):
        cfg.tol_A = 1.0


def test_run_config_overrides_solver_settings():
    run = RunConfig(algebra_spec="su:3", seed=9, tol_a=1e-6, max_iter=20, policy="first")
    cfg = run.solve_config(SolveConfig(verify_tol=1e-7))
    assert cfg.rng_seed == 9
    assert cfg.tol_A == 1e-6
    assert cfg.max_iter == 20
    assert cfg.policy == Policy.FIRST
    assert cfg.verify_tol == 1e-7
    assert cfg.sweep() == SweepConfig(tol_A=1e-6, tol_B=1e-8, max_iter=20, policy=Policy.FIRST, rng_seed=9)


def test_dumps_is_stable():
    text = dumps({"b": 1.5, "a": [0.1, 2]})
    assert text == '{\n  "a": [\n    0.1,\n    2\n  ],\n  "b": 1.5\n}\n'


def test_read_coordinates_rejects_non_arrays(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"x": 1}))
    with pytest.raises(ValueError):
        read_coordinates(path)
    path.write_text(json.dumps([1, "two"]))
    with pytest.raises(ValueError):
        read_coordinates(path)
    path.write_text(json.dumps([1, 2.5]))
    assert read_coordinates(path) == [1.0, 2.5]


def test_trace_jsonl_is_readable(tmp_path):
    lines = [
        TraceLine(stage=1, iter=1, root=0, b0_before=2.0, b0_after=1.0, decrease=3.0, seed=7),
        TraceLine(stage=2, iter=1, root=2, b0_before=1.0, b0_after=0.0, decrease=1.0, seed=7),
    ]
    path = write_trace(tmp_path / "trace.jsonl", lines)
    assert read_trace(path) == lines
    csv_text = render_trace(lines, OutputFormat.CSV)
    assert csv_text.splitlines()[1] == "1,1,0,2.0,1.0,3.0,7"
