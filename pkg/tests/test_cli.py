import csv
import json
import subprocess
import sys

import pytest

from qannulus.cli import RunConfig, main, results_json, run

REPORT_KEYS = {"command", "config", "results", "findings", "seed", "version", "elapsed_ms"}


def test_bound_r10(capsys):
    assert main(["bound", "--r", "10"]) == 0
    assert "C(r)=2.040004, envelope upper=2.040004" in capsys.readouterr().out


def test_bound_r2(capsys):
    assert main(["bound", "--r", "2"]) == 0
    assert "envelope upper=2.414214 (cited)" in capsys.readouterr().out


def test_bound_inf(capsys):
    assert main(["bound", "--r", "inf"]) == 0
    assert "C(r)=2" in capsys.readouterr().out


def test_invalid_r(capsys):
    assert main(["verify-dilation", "--r", "0.5"]) == 2
    err = capsys.readouterr().err
    assert "r must exceed 1 or be inf" in err
    finding = json.loads(err.strip().splitlines()[-1])
    assert finding["findings"][0]["kind"] == "invalid-config"


@pytest.mark.parametrize("argv", [["bound", "--dim", "0"], ["sweep", "--grid", "16"], ["cross-demo", "--eps", "1"]])
def test_invalid_configs(argv):
    assert main(argv) == 2


def test_cross_demo(capsys):
    assert main(["cross-demo", "--eps", "1e-6"]) == 0
    assert "ratio=1.999998" in capsys.readouterr().out


@pytest.mark.parametrize("r", ["2", "inf"])
def test_verify_dilation(r, tmp_path):
    path = tmp_path / "rep.json"
    assert main(["verify-dilation", "--r", r, "--dim", "3", "--trials", "10", "--seed", "42", "--json", str(path)]) == 0
    report = json.loads(path.read_text())
    assert set(report) == REPORT_KEYS
    assert report["results"]["all_passed"] and report["findings"] == []
    assert report["config"]["r"] == (2.0 if r == "2" else "inf")


def test_check_estimate_schema(tmp_path):
    path = tmp_path / "rep.json"
    assert main(["check-estimate", "--r", "2", "--trials", "5", "--grid", "512", "--json", str(path)]) == 0
    results = json.loads(path.read_text())["results"]
    assert results["C_r"] == pytest.approx(46 / 15)
    assert results["max_ratio"] <= 46 / 15


def test_identity_check_inf(capsys):
    code, report = run(RunConfig("identity-check", r="inf", trials=5, dim=3, deg=4).validate())
    assert code == 0
    assert report["results"]["nilpotent_residual"] <= 1e-12
    assert report["results"]["nilpotent_lhs_top_left"] == [[[0.0, 0.0], [0.0, 0.0]], [[2.0, 0.0], [0.0, 0.0]]]


def test_sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    code = main(["sweep", "--r", "2,3", "--dim", "2", "--deg", "2", "--budget", "200", "--restarts", "1", "--out", str(path)])
    assert code == 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["r", "C_r", "best_ratio", "gap", "dim", "deg", "budget", "seed"]
    assert [float(row[0]) for row in rows[1:]] == [2.0, 3.0]
    assert float(rows[1][1]) == pytest.approx(46 / 15)


@pytest.mark.parametrize("cfg", [
    dict(command="estimate-k", r=2.0, dim=2, deg=3, budget=300, restarts=2, seed=7),
    dict(command="check-estimate", r="inf", trials=4, grid=256, seed=3),
    dict(command="verify-dilation", r=1.5, trials=3, seed=5),
])
def test_results_are_byte_identical(cfg):
    _, a = run(RunConfig(**cfg).validate())
    _, b = run(RunConfig(**cfg).validate())
    assert results_json(a) == results_json(b)
    assert a["config"] == b["config"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "qannulus", "bound", "--r", "inf"], capture_output=True, text=True)
    assert out.returncode == 0 and "C(r)=2" in out.stdout
