import json
import subprocess
import sys
from pathlib import Path

import pandas as pd
import pytest

from app.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, MODE_COLUMNS, SPECTRUM_COLUMNS, SURFACE_COLUMNS, main

SERVER_DIR = Path(__file__).resolve().parents[1]


def test_mode_table(tmp_path):
    out = tmp_path / "mode.csv"
    assert main(["mode", "--n", "2", "--samples", "512", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == MODE_COLUMNS
    assert len(frame) == 512
    assert frame["z"].iloc[0] == 0.0 and frame["z"].iloc[-1] == 1.0
    assert frame["w"].iloc[-1] == pytest.approx(1.0, abs=1e-9)
    assert frame["deltaP"].iloc[-1] == 0.0


def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["mode", "--n", "1", "--samples", "64"]
    assert main(args + ["--out", str(first)]) == EXIT_OK
    assert main(args + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_mode_as_json(tmp_path):
    out = tmp_path / "mode.json"
    assert main(["mode", "--samples", "16", "--format", "json", "--out", str(out)]) == EXIT_OK
    records = json.loads(out.read_text())
    assert len(records) == 16
    assert sorted(records[0]) == sorted(MODE_COLUMNS)


def test_spectrum_table(tmp_path):
    out = tmp_path / "spectrum.csv"
    assert main(["spectrum", "--nmax", "2", "--oracle-cells", "2000", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == SPECTRUM_COLUMNS
    assert frame["n"].tolist() == [1, 2]
    assert frame["zero_count"].tolist() == [0, 1]
    assert (frame["lambda"].diff().dropna() < 0.0).all()
    assert (frame["oracle_rel_err"] < 1e-4).all()
    assert (frame["phase_speed"] == frame["frequency"]).all()


def test_surface_rows_are_time_major(tmp_path):
    out = tmp_path / "surface.csv"
    args = ["surface", "--kind", "2", "--eps", "0.01", "--t-count", "3", "--x-count", "5", "--out", str(out)]
    assert main(args) == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == SURFACE_COLUMNS
    assert len(frame) == 15
    assert (frame["t"].iloc[:5] == 0.0).all()
    assert frame["x"].iloc[:5].is_monotonic_increasing
    assert (frame["z_exact"] <= 1.0 + 0.011).all()


@pytest.mark.parametrize("argv", [
    ["spectrum", "--gamma", "2.5"],
    ["surface", "--eps", "0.01"],
    ["mode", "--n", "7", "--nmax", "6"],
    ["mode", "--eps", "0.5"],
    ["spectrum", "--lambda-series", "-3"],
    ["spectrum", "--config", "/nonexistent/run.cfg"],
    ["collapse"],
    [],
])
def test_configuration_errors(argv):
    assert main(argv) == EXIT_CONFIG


def test_malformed_config_file(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("nmax = 2\nthis line has no separator\n")
    assert main(["spectrum", "--config", str(path)]) == EXIT_CONFIG


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "validate" in capsys.readouterr().out


def test_module_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "app", "spectrum", "--gamma", "2.5"],
        cwd=SERVER_DIR, capture_output=True, text=True, timeout=120,
    )
    assert result.returncode == EXIT_CONFIG
    assert "gamma" in result.stderr
    assert result.stdout == ""


@pytest.mark.slow
def test_validate_passes_and_catches_injected_fault(tmp_path):
    clean, faulty = tmp_path / "clean.json", tmp_path / "faulty.json"
    assert main(["validate", "--out", str(clean)]) == EXIT_OK
    report = json.loads(clean.read_text())
    assert all(check["status"] == "pass" for check in report["checks"])

    assert main(["validate", "--inject-fault", "kappa", "--out", str(faulty)]) == EXIT_VALIDATION
    failed = {check["check_name"] for check in json.loads(faulty.read_text())["checks"] if check["status"] != "pass"}
    assert "spectrum.vacuum_normalization" in failed
