import csv
import json

import pytest

from darkcool.harness.cli import main

FAST = ["--set", "fock_cutoff=4", "--set", "nbar0=0.01"]


def _rows(text):
    return list(csv.DictReader(text.splitlines()))


def test_check_exit_zero(capsys):
    assert main(["check"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert {r["status"] for r in rows} == {"pass", "known-inconsistent"}


def test_empty_config_is_config_error(tmp_path, capsys):
    f = tmp_path / "p.cfg"
    f.write_text("")
    assert main(["check", "--config", str(f)]) == 1
    captured = capsys.readouterr()
    assert "configuration error" in captured.err and captured.out == ""


def test_unknown_key_is_config_error(tmp_path):
    f = tmp_path / "p.cfg"
    f.write_text("omega_g = 10\nlaser_power = 3\n")
    assert main(["rates", "--config", str(f)]) == 1
    assert main(["rates", "--set", "bogus=1"]) == 1


def test_numerical_failure_exit_two(capsys):
    assert main(["steady", "--set", "fock_cutoff=3", "--set", "omega_r=0"]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_evolve_csv(capsys):
    assert main(["evolve", *FAST, "--samples", "15"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 15
    assert list(rows[0]) == ["t", "nbar", "pop_g", "pop_d", "pop_r", "pop_e", "tail"]


def test_rates_and_optimize(capsys):
    assert main(["rates"]) == 0
    rows = {r["source"]: r for r in _rows(capsys.readouterr().out)}
    assert float(rows["closed_form"]["a_plus"]) == 0.0
    assert float(rows["resolvent"]["w"]) == pytest.approx(1.9608e-3, rel=1e-3)
    assert main(["optimize", "--set", "delta_g=0"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert float(row["delta_g"]) == 74.5


def test_steady_jsonl(capsys):
    assert main(["steady", "--set", "fock_cutoff=4", "--jsonl"]) == 0
    rec = json.loads(capsys.readouterr().out.strip())
    assert set(rec) == {"nss_numeric", "nss_analytic", "w_numeric", "tail"}


def test_sweep_to_outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("DARKCOOL_OUTDIR", str(tmp_path))
    assert main(["sweep", "--set", "fock_cutoff=4", "--axis", "omega_g", "--values", "8,10",
                 "--workers", "1"]) == 0
    rows = _rows((tmp_path / "sweep.csv").read_text())
    assert len(rows) == 2
    assert list(rows[0])[:7] == ["axis_value", "nss_numeric", "nss_analytic", "w_numeric",
                                 "w_resolvent", "w_closed_form", "status"]
    assert all(r["provenance"] for r in rows)


def test_sweep_bad_grid():
    assert main(["sweep", "--axis", "omega_g", "--values", "1,x"]) == 1


def test_spectrum_command(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["scenario", "fig2", "--output", str(out)]) == 0
    rows = _rows(out.read_text())
    assert len(rows) == 401 and list(rows[0]) == ["delta_r", "absorption"]


def test_sweep_csv_bit_identical(tmp_path):
    args = ["sweep", "--set", "fock_cutoff=4", "--axis", "omega_r", "--values", "0.5,1", "--workers", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "-o", str(a)]) == 0
    assert main([*args, "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
