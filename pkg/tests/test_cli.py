import json
import subprocess
import sys

import pytest

from designwalk.cli import run
from designwalk.circuits import circuit_from_dict
from designwalk.io import read_csv


def _files(tmp_path):
    return sorted(p.name for p in tmp_path.iterdir())


def test_gap_json(tmp_path):
    out = tmp_path / "gap.json"
    assert run(["gap", "--n", "3", "--k", "1", "--out", str(out), "--seed", "4"]) == 0
    d = json.loads(out.read_text())
    assert {"n", "k", "delta_gap", "delta_walk", "residual", "seed"} <= set(d)
    assert d["n"] == 3 and d["k"] == 1 and d["seed"] == 4
    assert d["delta_gap"] == pytest.approx(1.0)
    rec = json.loads((tmp_path / "gap.json.run.json").read_text())
    assert rec["config"]["command"] == "gap" and rec["config"]["seed"] == 4
    assert rec["outputs"][0]["path"] == str(out)
    assert _files(tmp_path) == ["gap.json", "gap.json.run.json"]


def test_seed_recorded_when_absent(tmp_path):
    out = tmp_path / "g.json"
    assert run(["gap", "--n", "2", "--k", "1", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert isinstance(d["seed"], int)
    assert json.loads((tmp_path / "g.json.run.json").read_text())["config"]["seed"] == d["seed"]


def test_gap_csv(tmp_path):
    out = tmp_path / "gap.csv"
    assert run(["gap", "--n", "2", "--k", "2", "--format", "csv", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["n", "k", "delta_gap", "delta_walk", "solver", "residual", "seed", "wall_time"]


@pytest.mark.parametrize("argv", [
    ["gap", "--n", "3"],
    ["gap", "--n", "3", "--k", "x"],
    ["nonsense"],
    [],
    ["gap", "--n", "3", "--k", "1", "--bogus"],
    ["depth", "--n", "3", "--k", "1", "--eps", "2"],
    ["gap", "--n", "1", "--k", "1"],
    ["sample-circuit", "--n", "3", "--t", "2", "--format", "csv"],
    ["equilibrate", "--n", "4", "--t", "1", "--target", "9", "--trials", "2"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_capacity_exit_1(capsys):
    assert run(["gap", "--n", "9", "--k", "3"]) == 1
    assert "dimension" in capsys.readouterr().err


def test_io_failure_exit_1(tmp_path):
    assert run(["gap", "--n", "2", "--k", "1", "--out", str(tmp_path / "missing" / "x.json")]) == 1


def test_stdout_without_out(capsys):
    assert run(["depth", "--n", "3", "--k", "1", "--eps", "0.01", "--seed", "1"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["t"] == 10 and d["seed"] == 1


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "k": 1, "t": "0..3"}))
    assert run(["design-error", "--config", str(cfg), "--seed", "2", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,k,t,error,predicted,delta_walk" and len(lines) == 5
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["gap", "--config", str(cfg)]) == 2


def test_sample_circuit(tmp_path):
    out = tmp_path / "c.json"
    assert run(["sample-circuit", "--n", "4", "--t", "6", "--topology", "all-pairs",
                "--seed", "3", "--out", str(out)]) == 0
    c = circuit_from_dict(json.loads(out.read_text()))
    assert len(c.gates) == 6 and c.seed == 3


def test_other_commands(tmp_path):
    assert run(["frame-potential", "--n", "2", "--k", "1", "--t", "0", "--samples", "5",
                "--out", str(tmp_path / "fp.json"), "--seed", "1"]) == 0
    assert json.loads((tmp_path / "fp.json").read_text())["value"] == 16.0
    assert run(["equilibrate", "--n", "4", "--t", "0,2", "--trials", "3", "--s", "2",
                "--out", str(tmp_path / "eq.csv"), "--seed", "1"]) == 0
    assert len(read_csv(tmp_path / "eq.csv")) == 6
    assert run(["nachtergaele", "--k", "1", "--m", "3", "--n-list", "4,5",
                "--out", str(tmp_path / "na.csv"), "--seed", "1"]) == 0
    assert all(r["holds"] == "true" for r in read_csv(tmp_path / "na.csv"))
    assert run(["scaling", "--k", "1", "--n-range", "3..5", "--format", "json",
                "--out", str(tmp_path / "sc.json"), "--seed", "1"]) == 0
    assert json.loads((tmp_path / "sc.json").read_text())["consistent"] is True


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "designwalk", "depth", "--n", "2", "--k", "1",
                           "--eps", "0.5", "--seed", "0"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["t"] == 1
    proc = subprocess.run([sys.executable, "-m", "designwalk", "gap"], capture_output=True, text=True)
    assert proc.returncode == 2
