import csv
import json
import subprocess
import sys

import pytest

from abel_midpoint.cli import main


def test_weights_json_classical(capsys):
    assert main(["weights", "--alpha", "1", "--n", "4"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["omega"] == [1.0] * 5
    assert data["omega_inv"] == [1.0, -1.0, 0.0, 0.0, 0.0]


def test_weights_csv(tmp_path):
    out = tmp_path / "w.csv"
    assert main(["weights", "--alpha", "0.5", "--n", "8", "--csv", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][:3] == ["n", "omega", "omega_inv"] and len(rows) == 10
    assert float(rows[1][1]) == pytest.approx(1.1283791670955126, rel=1e-15)


def test_verify_passes(capsys):
    assert main(["verify", "--alpha", "0.5", "--n", "4096"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 9


def test_experiment_table(tmp_path):
    out = tmp_path / "table1.csv"
    assert main(["experiment", "--example", "1", "--seed", "42", "--out", str(out)]) == 0
    text = out.read_bytes().decode()
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 7 and list(rows[0]) == ["N", "delta", "delta_rel_percent", "max_error", "ratio"]
    assert "\r" not in text
    again = tmp_path / "again.csv"
    main(["experiment", "--example", "1", "--seed", "42", "--out", str(again)])
    assert again.read_bytes() == out.read_bytes()


def test_experiment_from_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.5, "q": 1, "use_corrections": True, "N_list": [16, 32, 64], "noise_p": 1.5}))
    assert main(["experiment", "--config", str(cfg)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4


def test_solve_writes_report(tmp_path):
    cfg = tmp_path / "solve.json"
    cfg.write_text(json.dumps({"alpha": 0.5, "q": 2, "N": 64, "noise_p": 1.5, "seed": 2, "diagnostics": True}))
    out = tmp_path / "report.json"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert len(rep["u_mid"]) == 64 and rep["seed"] == 2 and rep["stability"]["norm_D"] > 0


def test_rates_reports_agreement(capsys):
    assert main(["rates", "--example", "1"]) == 0
    study = json.loads(capsys.readouterr().out)
    assert study["within_tolerance"] and abs(study["fitted"] - 1.5) <= 0.15


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["weights", "--alpha", "0.5"],
        ["weights", "--alpha", "0.5", "--n", "4", "--frobnicate"],
        ["experiment", "--example", "7"],
        ["weights", "--alpha", "1.5", "--n", "4"],
        ["solve", "--config", "/nonexistent/config.json"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "abel_midpoint", "weights", "--alpha", "1", "--n", "2", "--csv"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[2].startswith("1,1,-1,0")


def test_module_entry_point_usage_exit():
    res = subprocess.run([sys.executable, "-m", "abel_midpoint", "--nope"], capture_output=True, text=True)
    assert res.returncode == 2 and "usage" in res.stderr
