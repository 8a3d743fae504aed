from __future__ import annotations

import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from guderley import __version__
from guderley.cli import SCHEMA, main, parse_list
from guderley.errors import DomainError


def _solve_file(tmp_path: Path) -> Path:
    out = tmp_path / "sol.json"
    assert main(["solve", "--gamma", "1.4", "--m", "2", "--out", str(out)]) == 0
    return out


def test_lambda_command(capsys):
    assert main(["lambda", "--gamma", "1.4", "--m", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["lambda"] == pytest.approx(1.3943607837755, abs=1e-10)
    assert data["triple_point"] == "P6"


def test_lambda_domain_error(capsys):
    assert main(["lambda", "--gamma", "0.9", "--m", "2"]) == 2
    assert "DomainError" in capsys.readouterr().err


def test_env_tolerance(monkeypatch, capsys):
    monkeypatch.setenv("GUDERLEY_TOL", "not-a-number")
    assert main(["lambda", "--gamma", "1.4", "--m", "2"]) == 2


def test_solve_outputs(tmp_path):
    out = _solve_file(tmp_path)
    data = json.loads(out.read_text())
    assert data["schema"] == SCHEMA
    assert data["intersection_count"] == 1 and data["entropy_ok"] is True
    assert data["C_H"] < 0.0 < data["x_H"]
    table = tmp_path / "branches.csv"
    assert main(["solve", "--gamma", "1.4", "--m", "2", "--lambda", str(data["lambda"]),
                 "--csv", str(table), "--out", str(tmp_path / "again.json")]) == 0
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["branch_id", "x", "V", "C", "R"]
    assert {r[0] for r in rows[1:]} >= {"1", "2", "3", "4"}


def test_fields_command(tmp_path):
    sol = _solve_file(tmp_path)
    out = tmp_path / "fields.csv"
    assert main(["fields", str(sol), "-1,0,1", "0.5:2:4", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 12
    assert all(float(r["rho"]) > 0.0 for r in rows)


def test_fields_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": ')
    assert main(["fields", str(bad), "0", "1"]) == 2
    assert "bad.json:1:" in capsys.readouterr().err
    bad.write_text(json.dumps({"schema": SCHEMA, "gamma": 1.4, "m": "two", "lambda": 1.39}))
    assert main(["fields", str(bad), "0", "1"]) == 2
    assert main(["fields", str(tmp_path / "missing.json"), "0", "1"]) == 2


def test_fields_rejects_nonpositive_radius(tmp_path):
    sol = _solve_file(tmp_path)
    assert main(["fields", str(sol), "0", "0,1"]) == 2


def test_phase_command(tmp_path):
    out = tmp_path / "phase.csv"
    assert main(["phase", "--gamma", "1.4", "--m", "2", "--out", str(out)]) == 0
    tags = {r["curve_id"] for r in csv.DictReader(out.open())}
    assert {"P6", "sonic_upper", "collapse", "extension", "V_inf", "jump_locus"} <= tags


def test_certify_command(tmp_path):
    out = tmp_path / "cert.json"
    assert main(["certify", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["all_pass"] and data["count"] == len(data["items"])
    assert all({"id", "interval", "method", "status"} <= set(i) for i in data["items"])


def test_parse_list():
    assert parse_list("-1,0,1", "t") == [-1.0, 0.0, 1.0]
    assert parse_list("0:1:3", "t") == [0.0, 0.5, 1.0]
    with pytest.raises(DomainError):
        parse_list("a,b", "t")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "guderley", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == __version__
