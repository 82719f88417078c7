import json
import subprocess
import sys

import pytest

from catint.cli import main, merge, parse_levels


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_integrate_sampler(capsys):
    code, out, _ = run(capsys, "integrate", "--function", "x1")
    data = json.loads(out)
    assert code == 0 and data["converged"]
    assert data["value"] == pytest.approx(0.5)
    assert set(data) == {"value", "level_reached", "converged", "residual"}


def test_integrate_step_literal_exact(capsys):
    code, out, _ = run(capsys, "integrate", "--function", "step:2,0,0,0,1", "--measure", "power:2")
    assert code == 0 and json.loads(out)["value"] == "7/16"


def test_integrate_two_dimensions(capsys):
    code, out, _ = run(capsys, "integrate", "--function", "x1 * x2", "--levels", "2:8")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.25)


def test_antiderive_and_differentiate(capsys):
    code, out, _ = run(capsys, "antiderive", "--function", "step:1,1,3")
    assert code == 0 and json.loads(out)["value"] == ["0", "1/2", "2"]
    code, out, _ = run(capsys, "differentiate", "--function", "pl:1,0,1/2,2")
    assert code == 0 and json.loads(out)["value"] == ["1", "3"]
    code, _, err = run(capsys, "antiderive", "--function", "step:1,1,3", "--measure", "power:2")
    assert code == 1 and "error" in err


def test_fourier(capsys):
    code, out, _ = run(capsys, "fourier", "--function", "step:1,1,-1", "--k", "1")
    value = json.loads(out)["value"]
    assert code == 0
    assert value["re"] == pytest.approx(0, abs=1e-12)
    assert value["im"] == pytest.approx(-0.63662, abs=1e-4)


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--function", "x1", "--levels", "1:3", "--backend", "rational")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines == ["level,value,residual", "1,1/2,", "2,1/2,0", "3,1/2,0"]


def test_exit_codes(capsys):
    code, _, err = run(capsys, "integrate", "--function", "x1 +* 2")
    assert code == 1 and "column 5" in err
    code, _, _ = run(capsys, "integrate", "--bogus")
    assert code == 1
    code, _, err = run(capsys, "integrate", "--function", "x1 * x1", "--levels", "2:4", "--tol", "0",
                       "--convention", "left")
    assert code == 2 and "no convergence" in err
    code, _, _ = run(capsys, "integrate", "--function", "x1", "--measure", "power:1/2")
    assert code == 1


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "roundtrip", "--cases", "20")
    assert code == 0 and out.startswith("PASS roundtrip: 20/20")
    code, _, _ = run(capsys, "verify", "--suite", "nonsense")
    assert code == 1


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"function": "x1", "measure": "power:2", "levels": "2:12", "tol": 1e-7}))
    assert merge(str(cfg), {"function": "1"}).function == "1"
    assert merge(str(cfg), {"function": None}).measure == "power:2"
    code, out, _ = run(capsys, "integrate", "--config", str(cfg))
    assert code == 0 and json.loads(out)["value"] == pytest.approx(2 / 3, abs=1e-6)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    code, _, _ = run(capsys, "integrate", "--config", str(bad))
    assert code == 1


def test_parse_levels():
    assert parse_levels(None, 1) == (4, 16)
    assert parse_levels(None, 2) == (4, 12)
    assert parse_levels("3:5", 1) == (3, 5)


def test_deterministic_and_module_entry():
    cmd = [sys.executable, "-m", "catint", "verify", "--suite", "uniqueness", "--cases", "15", "--seed", "4"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    second = subprocess.run(cmd, capture_output=True, text=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
