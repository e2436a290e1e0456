import json
import subprocess
import sys

import pytest

from tngames.cli import main
from tngames.gadgets import gen


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def result(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert len(doc["instance_digest"]) == 64
    return doc["result"]


def test_validate(capsys):
    r = result(capsys, "validate", "--instance", "example1")
    assert (r["players"], r["vertices"], r["clocks"], r["edges"]) == (2, 5, 2, 4)
    assert r["profiles"] == ["p1"]


def test_cost_and_potential(capsys):
    r = result(capsys, "cost", "--instance", "example1", "--profile", "p1")
    assert r == {"per_player": ["10", "14"], "total": "24"}
    assert result(capsys, "potential", "--instance", "example1")["potential"] == "19"


def test_best_response(capsys):
    r = result(capsys, "best-response", "--instance", "example1", "--profile", "p1", "--player", "1")
    assert r["best_cost"] == "7" and r["current_cost"] == "10" and not r["already_best"]
    assert r["strategy"] == "(s,1), (v1,2), u1"


def test_nash_from_a_named_seed(capsys):
    r = result(capsys, "nash", "--instance", "example1", "--seed", "p1")
    assert r["steps"] == 2 and r["total"] == "19"
    assert [s["player"] for s in r["trace"]] == [1, 2]


def test_social_optimum_and_inefficiency(capsys):
    r = result(capsys, "social-optimum", "--instance", "example1")
    assert r["cost"] == "18" and r["end_time"] == "4"
    r = result(capsys, "inefficiency", "--instance", "example1")
    assert r["ratio"] == "1" and r["family"] == "affine" and r["bound_satisfied"]


def test_oracle(capsys):
    r = result(capsys, "oracle", "--instance", "example1", "--player", "1", "--profile", "p1")
    assert r["best_cost"] == "7"
    r = result(capsys, "oracle", "--instance", "example1", "--horizon", "8")
    assert r["so_cost"] == "18"


def test_horizon(capsys):
    r = result(capsys, "horizon", "--instance", "example1")
    assert r["single_player"] == 245
    assert r["ne_time_bound"] >= r["single_player"]


def test_gen_output_loads_back(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, _, _ = run(capsys, "gen", "subset-sum-cs", "--numbers", "1,2", "--mu", "3", "--output", str(out))
    assert code == 0
    assert json.loads(out.read_text()) == gen("subset-sum-cs", A=[1, 2], mu=3)
    r = result(capsys, "best-response", "--instance", str(out), "--player", "1")
    assert r["best_cost"] == "1/2"


def test_table_format(capsys):
    code, out, _ = run(capsys, "cost", "--instance", "example1", "--format", "table")
    assert code == 0
    assert out.splitlines()[0] == "command: cost"
    assert any(line.startswith("total") and line.rstrip().endswith("24") for line in out.splitlines())


def test_profile_from_a_file(capsys, tmp_path, ex1):
    path = tmp_path / "prof.json"
    path.write_text(json.dumps(ex1.document["profiles"][0]))
    r = result(capsys, "cost", "--instance", "example1", "--profile", str(path))
    assert r["total"] == "24"


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["cost"],
        ["cost", "--instance", "nowhere.json"],
        ["best-response", "--instance", "example1", "--profile", "p1"],
        ["best-response", "--instance", "example1", "--profile", "p1", "--player", "3"],
        ["cost", "--instance", "example1", "--profile", "missing"],
        ["gen"],
        ["gen", "cs-prime", "--mu", "2"],
    ],
)
def test_usage_and_model_errors_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err.startswith("tng:")


def test_budget_refusal_exits_two(capsys):
    code, out, err = run(capsys, "social-optimum", "--instance", "big-product")
    assert code == 2 and out == ""
    report = json.loads(err.splitlines()[-1])
    assert report["error"] == "budget" and report["report"]["product_bound"] > 10**7


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tngames", "cost", "--instance", "example1"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["total"] == "24"
