"""Command-line entry points, exit codes, and byte-level reproducibility."""

from __future__ import annotations

import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

import spinsqueeze.cli as cli


def run_cli(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "spinsqueeze", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_rates_command_reports_scalars():
    proc = run_cli("rates")
    assert proc.returncode == 0
    rows = parse_csv(proc.stdout)
    assert len(rows) == 1
    row = rows[0]
    assert float(row["r0"]) == pytest.approx(0.9801980198019802, rel=1e-14)
    assert float(row["delta_prime_over_gamma0"]) == pytest.approx(
        1.6739993426e-4, rel=1e-8
    )
    assert row["valid_all"] == "true"


def test_console_script_matches_module_invocation():
    script = shutil.which("spinsqueeze")
    assert script is not None, "console script not installed"
    via_script = subprocess.run(
        [script, "rates"], capture_output=True, text=True
    )
    via_module = run_cli("rates")
    assert via_script.returncode == 0
    assert via_script.stdout == via_module.stdout


def test_analytic_command_json_output():
    proc = run_cli(
        "analytic",
        "--set", "input.n_photons=1",
        "--format", "json",
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert len(payload["rows"]) == 1
    assert payload["rows"][0]["xi2_analytic"] == pytest.approx(
        0.18797737277353632, rel=1e-13
    )


def test_numeric_command_agrees_with_analytic():
    proc = run_cli(
        "numeric",
        "--set", "geometry.n_layers=4",
        "--set", "input.n_photons=1,10",
        "--set", "kernel.include_evanescent=false",
    )
    assert proc.returncode == 0
    for row in parse_csv(proc.stdout):
        assert row["xi2_analytic"] == ""
        assert float(row["xi2_numeric"]) > 0.0


def test_config_file_and_set_precedence(tmp_path):
    cfg = tmp_path / "experiment.cfg"
    cfg.write_text(
        "geometry.n_layers = 4\ninput.n_photons = 1\nmodel = analytic\n",
        encoding="utf-8",
    )
    base = run_cli("sweep", "--config", str(cfg))
    assert base.returncode == 0
    overridden = run_cli(
        "sweep", "--config", str(cfg), "--set", "input.n_photons=2"
    )
    assert overridden.returncode == 0
    assert float(parse_csv(base.stdout)[0]["n_photons"]) == 1.0
    assert float(parse_csv(overridden.stdout)[0]["n_photons"]) == 2.0


def test_unknown_key_is_a_config_error():
    proc = run_cli("sweep", "--set", "nonsense=1")
    assert proc.returncode == 2
    assert "nonsense" in proc.stderr


def test_bad_config_file_reports_line(tmp_path):
    cfg = tmp_path / "broken.cfg"
    cfg.write_text("model = both\nwhat is this\n", encoding="utf-8")
    proc = run_cli("sweep", "--config", str(cfg))
    assert proc.returncode == 2
    assert ":2" in proc.stderr


def test_all_points_failing_exits_three():
    proc = run_cli(
        "mc-check",
        "--set", "input.n_photons=1,2",
        "--set", "mc.method=euler",
        "--set", "mc.dt=50",
        "--set", "mc.t_avg=100",
        "--set", "geometry.n_layers=2",
    )
    assert proc.returncode == 3
    assert "every grid point failed" in proc.stderr
    # The table still lands on stdout with the error column filled in.
    rows = parse_csv(proc.stdout)
    assert all(row["error"].startswith("DomainError") for row in rows)


def test_partial_failure_warns_but_succeeds(monkeypatch, capsys):
    rows = [
        {"n_photons": 1.0, "error": ""},
        {"n_photons": 2.0, "error": "DomainError: synthetic"},
    ]
    monkeypatch.setattr(cli, "run_sweep", lambda config: rows)
    code = cli.main(["sweep", "--set", "input.n_photons=1,2"])
    captured = capsys.readouterr()
    assert code == 0
    assert "1 of 2 grid points failed" in captured.err


def test_sweep_rerun_is_byte_identical():
    args = (
        "sweep",
        "--set", "model=mc-check",
        "--set", "input.n_photons=0.5,1",
        "--set", "geometry.n_layers=2",
        "--set", "mc.n_traj=8",
        "--set", "mc.t_burn=10",
        "--set", "mc.t_avg=40",
        "--set", "mc.dt=0.25",
        "--seed", "12",
    )
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert float(parse_csv(first.stdout)[0]["mc_stderr"]) > 0.0


def test_out_file_writing(tmp_path):
    target = tmp_path / "table.csv"
    proc = run_cli(
        "analytic", "--set", "input.n_photons=1", "--out", str(target)
    )
    assert proc.returncode == 0
    assert proc.stdout == ""
    content = target.read_bytes()
    assert content.startswith(b"n_photons,")
    assert b"\r\n" in content


def test_fig_preset_writes_files(tmp_path):
    proc = run_cli("fig4", "--out", str(tmp_path))
    assert proc.returncode == 0
    written = [line for line in proc.stdout.splitlines() if line]
    assert len(written) == 2
    table = tmp_path / "fig4.csv"
    summary = tmp_path / "fig4_summary.json"
    assert table.exists() and summary.exists()
    data = json.loads(summary.read_text())
    assert data["lattice_const"] == 0.95
