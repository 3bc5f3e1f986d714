"""End-to-end tests of the ``comm`` command line."""
import json

import pytest
from click.testing import CliRunner
from loguru import logger

from comm_tool.cli import create_cli
from comm_tool.utils.serialization import read_trace


@pytest.fixture
def cli():
    yield create_cli()
    # drop the sinks bound to the runner's streams
    logger.remove()
    logger.disable("comm_tool")


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, cli, *args):
    return runner.invoke(cli, ["--log-level", "ERROR", *map(str, args)], catch_exceptions=False)


def generate(runner, cli, spec, seed, out_dir):
    result = invoke(runner, cli, "generate", spec, "--seed", seed, "--out", out_dir)
    assert result.exit_code == 0, result.output
    return out_dir / "A.json", out_dir / "B.json"


@pytest.mark.parametrize("spec, dim, rank, positive_roots", [
    ("su:3", 8, 2, 3),
    ("so:3", 3, 1, 1),
    ("sum:su:2+su:2", 6, 2, 2),
])
def test_generate_metadata(runner, cli, tmp_path, spec, dim, rank, positive_roots):
    a_file, b_file = generate(runner, cli, spec, 7, tmp_path)
    metadata = json.loads((tmp_path / "algebra.json").read_text())
    assert metadata == {
        "algebra_spec": spec,
        "dim": dim,
        "positive_roots": positive_roots,
        "rank": rank,
        "seed": 7,
    }
    assert len(json.loads(a_file.read_text())) == dim
    assert len(json.loads(b_file.read_text())) == dim


def test_generate_rejects_bad_spec(runner, cli, tmp_path):
    result = invoke(runner, cli, "generate", "sl:3", "--out", tmp_path)
    assert result.exit_code == 2


def test_generate_is_byte_identical(runner, cli, tmp_path):
    generate(runner, cli, "su:2", 3, tmp_path / "first")
    generate(runner, cli, "su:2", 3, tmp_path / "second")
    for name in ("algebra.json", "A.json", "B.json"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


@pytest.mark.parametrize("spec, rank, positive_roots", [("su:2", 1, 1), ("so:6", 3, 6)])
def test_decompose(runner, cli, tmp_path, spec, rank, positive_roots):
    out = tmp_path / "frame.json"
    result = invoke(runner, cli, "decompose", spec, "--seed", 1, "--out", out)
    assert result.exit_code == 0, result.output
    frame = json.loads(out.read_text())
    assert frame["rank"] == rank
    assert frame["positive_roots"] == positive_roots
    assert len(frame["roots"]) == positive_roots
    assert frame["dimension_check"] is True


def test_decompose_is_byte_identical(runner, cli, tmp_path):
    for name in ("first.json", "second.json"):
        assert invoke(runner, cli, "decompose", "su:2", "--seed", 5, "--out", tmp_path / name).exit_code == 0
    assert (tmp_path / "first.json").read_bytes() == (tmp_path / "second.json").read_bytes()


def test_decompose_to_stdout(runner, cli):
    result = invoke(runner, cli, "decompose", "so:3")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["dim"] == 3


def test_solve_and_verify(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:3", 7, tmp_path)
    cert = tmp_path / "cert.json"
    result = invoke(runner, cli, "solve", "su:3", a_file, b_file, "--seed", 7, "--out", cert)
    assert result.exit_code == 0, result.output

    trace = read_trace(tmp_path / "cert.trace.jsonl")
    for stage in (1, 2):
        b0 = [line.b0_before for line in trace if line.stage == stage]
        assert all(later < earlier for earlier, later in zip(b0, b0[1:]))

    record = json.loads(cert.read_text())
    assert record["algebra_spec"] == "su:3"
    assert set(record) >= {"X", "Y_A", "Y_B", "residual_A", "residual_B", "regularity_margin", "generators"}

    result = invoke(runner, cli, "verify", cert, a_file, b_file)
    assert result.exit_code == 0, result.output


def test_solve_is_byte_identical(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:2", 1, tmp_path)
    for name in ("first.json", "second.json"):
        result = invoke(runner, cli, "solve", "su:2", a_file, b_file, "--seed", 1, "--out", tmp_path / name)
        assert result.exit_code == 0, result.output
    assert (tmp_path / "first.json").read_bytes() == (tmp_path / "second.json").read_bytes()
    assert (tmp_path / "first.trace.jsonl").read_bytes() == (tmp_path / "second.trace.jsonl").read_bytes()


def test_solve_zero_elements(runner, cli, tmp_path):
    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps([0.0] * 8))
    cert = tmp_path / "cert.json"
    result = invoke(runner, cli, "solve", "su:3", zero, zero, "--out", cert)
    assert result.exit_code == 0, result.output
    record = json.loads(cert.read_text())
    assert record["residual_A"] == 0.0
    assert record["residual_B"] == 0.0


def test_solve_dimension_mismatch(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:2", 0, tmp_path)
    result = invoke(runner, cli, "solve", "su:3", a_file, b_file, "--out", tmp_path / "cert.json")
    assert result.exit_code == 3


def test_solve_max_iterations_writes_partial_trace(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:3", 2, tmp_path)
    cert = tmp_path / "cert.json"
    result = invoke(runner, cli, "solve", "su:3", a_file, b_file, "--max-iter", 1, "--out", cert)
    assert result.exit_code == 4
    assert len(read_trace(tmp_path / "cert.trace.jsonl")) == 1
    assert not cert.exists()


def test_verify_tampered_certificate(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:2", 4, tmp_path)
    cert = tmp_path / "cert.json"
    assert invoke(runner, cli, "solve", "su:2", a_file, b_file, "--out", cert).exit_code == 0
    record = json.loads(cert.read_text())
    record["Y_A"] = [0.0] * 3
    cert.write_text(json.dumps(record))
    result = invoke(runner, cli, "verify", cert, a_file, b_file)
    assert result.exit_code == 1
    assert "residual_A" in result.output


def test_verify_wrong_dimension_element(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:2", 4, tmp_path)
    cert = tmp_path / "cert.json"
    assert invoke(runner, cli, "solve", "su:2", a_file, b_file, "--out", cert).exit_code == 0
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps([1.0, 2.0]))
    assert invoke(runner, cli, "verify", cert, wrong, b_file).exit_code == 2


def test_verify_unreadable_certificate(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:2", 4, tmp_path)
    cert = tmp_path / "cert.json"
    cert.write_text("{not json")
    assert invoke(runner, cli, "verify", cert, a_file, b_file).exit_code == 2


@pytest.mark.parametrize("fmt", ["jsonl", "json", "csv"])
def test_trace_formats(runner, cli, tmp_path, fmt):
    a_file, b_file = generate(runner, cli, "so:5", 3, tmp_path)
    out = tmp_path / f"trace.{fmt}"
    result = invoke(runner, cli, "trace", "so:5", a_file, b_file, "--format", fmt, "--out", out)
    assert result.exit_code == 0, result.output
    text = out.read_text()
    if fmt == "csv":
        assert text.splitlines()[0] == "stage,iter,root,b0_before,b0_after,decrease,seed"
    elif fmt == "json":
        assert isinstance(json.loads(text), list)
    else:
        assert all(json.loads(line)["stage"] in (1, 2) for line in text.splitlines())


def test_trace_dimension_mismatch(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "so:5", 3, tmp_path)
    assert invoke(runner, cli, "trace", "so:4", a_file, b_file).exit_code == 3


def test_su2_outputs_match_golden(runner, cli, tmp_path, golden):
    a_file, b_file = generate(runner, cli, "su:2", 0, tmp_path)
    golden("su2/algebra.json", (tmp_path / "algebra.json").read_text())
    golden("su2/A.json", a_file.read_text())
    golden("su2/B.json", b_file.read_text())

    frame = tmp_path / "frame.json"
    assert invoke(runner, cli, "decompose", "su:2", "--seed", 0, "--out", frame).exit_code == 0
    golden("su2/frame.json", frame.read_text())

    cert = tmp_path / "cert.json"
    result = invoke(runner, cli, "solve", "su:2", a_file, b_file, "--seed", 0, "--out", cert)
    assert result.exit_code == 0, result.output
    golden("su2/cert.json", cert.read_text())
    golden("su2/cert.trace.jsonl", (tmp_path / "cert.trace.jsonl").read_text())

    assert invoke(runner, cli, "verify", cert, a_file, b_file).exit_code == 0


def test_trace_lines_carry_the_seed(runner, cli, tmp_path):
    a_file, b_file = generate(runner, cli, "su:3", 5, tmp_path)
    out = tmp_path / "trace.jsonl"
    assert invoke(runner, cli, "trace", "su:3", a_file, b_file, "--seed", 5, "--out", out).exit_code == 0
    lines = read_trace(out)
    assert lines
    assert {line.seed for line in lines} == {5}
