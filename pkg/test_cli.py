#!/usr/bin/env python3
"""
CLI tests
Subcommand dispatch, output formats, configuration errors and exit codes
"""

import json
import math
import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

# Add the project directory to Python path
project_dir = Path(__file__).parent
sys.path.insert(0, str(project_dir))

from app.core.errors import CHECK_REFERENCES, CheckFailed
from app.main import build_parser, run
from app.models import RunConfig


def last_json_line(text: str) -> dict:
    return json.loads(text.strip().splitlines()[-1])


def test_every_command_is_registered():
    parser = build_parser()
    subparsers = next(action for action in parser._actions if action.dest == "command")
    assert set(subparsers.choices) == {
        "staircase", "gaps", "phi", "control",
        "herman-check", "family-audit", "demo-shift",
        "lemma-key", "sweep", "sturmian-exponent", "approximants",
    }


def test_gaps_json(capsys):
    assert run(["gaps", "--depth", "5", "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["metadata"]["command"] == "gaps"
    assert document["metadata"]["alpha"] == "gold2"
    rows = document["rows"]
    assert [row["n"] for row in rows] == [0, 1, 2, 3, 4]
    assert [row["exact_length"] for row in rows] == ["1/2", "1/4", "1/8", "1/16", "1/32"]
    assert all(row["length_error"] < 1e-30 for row in rows)


def test_gaps_csv_has_a_commented_header(capsys):
    assert run(["gaps", "--depth", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    comments = [line for line in lines if line.startswith("# ")]
    body = [line for line in lines if not line.startswith("# ")]
    assert "# command: gaps" in comments
    assert body[0] == "n,left,right,length,exact_length,length_error"
    assert len(body) == 4


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out" / "gaps.json"
    assert run(["gaps", "--depth", "2", "--format", "json", "--out", str(target)]) == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "SUCCESS" in captured.err
    assert len(json.loads(target.read_text())["rows"]) == 2


def test_runs_are_deterministic(capsys):
    argv = ["staircase", "--samples", "8", "--format", "json"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert len(json.loads(first)["rows"]) == 9


def test_invalid_config_exits_with_two(capsys):
    assert run(["gaps", "--epsilon", "0.5"]) == 2
    record = last_json_line(capsys.readouterr().err)
    assert record["status"] == "failed"
    assert record["check"] == "invalid-config"
    assert "c > epsilon" in record["message"]
    assert record["reference"] == CHECK_REFERENCES["invalid-config"]


def test_malformed_alpha_is_a_config_error(capsys):
    assert run(["gaps", "--alpha", "surd:1,2"]) == 2
    assert last_json_line(capsys.readouterr().err)["check"] == "invalid-config"


def test_c_and_gamma_are_exclusive():
    with pytest.raises(SystemExit) as excinfo:
        run(["gaps", "--c", "0.3", "--gamma", "2"])
    assert excinfo.value.code == 2


def test_run_config_validation():
    assert RunConfig(gamma=2.0).exponent == pytest.approx(math.log(1.25))
    with pytest.raises(ValidationError):
        RunConfig(period_max=20, period_cap=16)
    with pytest.raises(ValidationError):
        RunConfig(precision=16)
    with pytest.raises(ValidationError):
        RunConfig(c=0.3, gamma=2.0)
    with pytest.raises(ValidationError):
        RunConfig(workers=0)


def test_demo_shift(capsys):
    assert run(["demo-shift", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert len(rows) == 8
    assert rows[0]["orbit_id"] == "fixed:0"
    assert rows[0]["lambda1"] == pytest.approx(math.log(2))
    assert all(row["lambda1"] == 0.0 for row in rows[1:])
    assert all(row["holds"] for row in rows)


def test_herman_check(capsys):
    argv = ["herman-check", "--iters", "20000", "--samples", "2", "--identity-max", "3",
            "--tolerance", "0.02", "--format", "json"]
    assert run(argv) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [row["kind"] for row in rows] == ["exponent"] * 2 + ["identity"] * 3
    assert all(row["holds"] for row in rows)


def test_failed_checks_exit_with_one(capsys):
    argv = ["herman-check", "--iters", "2000", "--samples", "1", "--identity-max", "1", "--tolerance", "1e-12"]
    assert run(argv) == 1
    record = last_json_line(capsys.readouterr().err)
    assert record["check"] == "herman-exponent"
    assert record["status"] == "failed"
    assert record["reference"] == CHECK_REFERENCES["herman-exponent"]


def test_family_audit(capsys):
    argv = ["family-audit", "--family", "pure", "--depth", "24", "--nodes", "4", "--iters", "200",
            "--samples", "4", "--format", "json"]
    assert run(argv) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["metadata"]["violations"] == 0
    assert document["metadata"]["attained"] is True


def test_sweep_csv_columns(capsys):
    argv = ["sweep", "--family", "pure", "--period-max", "2", "--depth", "24", "--no-chain"]
    assert run(argv) == 0
    body = [line for line in capsys.readouterr().out.splitlines() if not line.startswith("# ")]
    assert body[0] == "orbit_id,period,mu_I0_num,mu_I0_den,lambda1,bound,margin"
    assert [line.split(",")[0] for line in body[1:]] == ["1:0", "2:01", "nu"]


def test_lemma_key_small(capsys):
    argv = ["lemma-key", "--depth", "24", "--gap-max", "2", "--samples", "2", "--format", "json"]
    assert run(argv) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert len(rows) == 9
    assert all(row["holds"] for row in rows)


def test_approximants(capsys):
    argv = ["approximants", "--depth", "24", "--q-max", "13", "--format", "json"]
    assert run(argv) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [row["q"] for row in rows] == [2, 3, 5, 8, 13]
    assert all(row["holds"] for row in rows)


@pytest.mark.slow
def test_sturmian_exponent(capsys):
    argv = ["sturmian-exponent", "--iters", "200000", "--samples", "2", "--format", "json"]
    assert run(argv) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert all(abs(row["error"]) < 5e-3 for row in rows)
    assert all(row["reduction_residual"] < 1e-6 for row in rows)


def test_every_raised_check_has_a_reference():
    raised = {
        "invalid-config", "numerical-error", "herman-exponent", "herman-identity",
        "family-product-bound", "family-attainment", "two-symbol-exponent", "gap-traversal-bound",
        "isolation-bound", "hitting-chain-bound", "sturmian-exponent", "rotation-reduction",
        "approximant-bound",
    }
    assert raised <= set(CHECK_REFERENCES)
    assert all(CHECK_REFERENCES[check] for check in raised)
    with pytest.raises(KeyError):
        CheckFailed("unregistered-check", "no statement")


def test_control_at_the_default_depth(capsys):
    assert run(["control", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [row["n"] for row in rows] == list(range(65))
    assert all(row["t"] > 0 for row in rows)
    assert all(row["M"] <= row["v"] + 1e-12 for row in rows)


def test_staircase_defaults_to_the_inverse(capsys):
    assert run(["staircase", "--samples", "4", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert set(rows[0]) == {"y", "h", "radius"}
    assert [row["y"] for row in rows] == ["0", "1/4", "1/2", "3/4", "1"]
    values = [row["h"] for row in rows]
    assert values == sorted(values)
    assert values[-1] - values[0] == pytest.approx(1.0, abs=1e-12)

    assert run(["staircase", "--samples", "4", "--forward", "--format", "json"]) == 0
    assert set(json.loads(capsys.readouterr().out)["rows"][0]) == {"x", "F", "f", "radius"}


def test_phi_samples_inside_the_first_gaps(capsys):
    assert run(["phi", "--gaps", "3", "--samples", "4", "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    rows = document["rows"]
    assert document["metadata"]["gaps"] == 3
    assert len(rows) == 12
    assert all(row["verdict"] == "in-gap" for row in rows)
    assert [row["n"] for row in rows] == [0] * 4 + [1] * 4 + [2] * 4
    assert all(0.0 < row["phi"] <= 1.0 for row in rows)
