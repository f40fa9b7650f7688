import importlib
import subprocess
import sys

import pytest

from vhd.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from vhd.scenario import read_csv

integ = importlib.import_module("vhd.integrate")


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("VHD_OUT_DIR", str(tmp_path / "out"))
    return tmp_path / "out"


def test_simulate(tmp_path, out, capsys):
    cfg = tmp_path / "short.cfg"
    cfg.write_text("preset = fig1a\nhorizon_days = 5\nname = short\n")
    assert main(["simulate", str(cfg)]) == EXIT_OK
    t, y = read_csv(out / "short.csv")
    assert t[-1] == 5.0 and y.shape == (11, 9)
    assert (out / "short_report.txt").exists()
    assert str(out / "short.csv") in capsys.readouterr().out


def test_analyze_preset_name(out, capsys):
    assert main(["analyze", "fig1c"]) == EXIT_OK
    text = capsys.readouterr().out
    assert "R0 = 98.28137" in text and "O = 0.04127" in text
    assert not (out / "fig1c.csv").exists()


@pytest.mark.parametrize("target, first", [("r0sq", "a_v,2"), ("o", "d_v,-1"), ("o0", "d_v,-1")])
def test_sensitivity(target, first, out, capsys):
    assert main(["sensitivity", "fig1b", "--target", target]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "parameter,index" and lines[2] == first
    assert len(lines) == 26
    assert (out / f"fig1b_sensitivity_{target}.csv").exists()


def test_presets_list(capsys):
    assert main(["presets", "list"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert [line.split(":")[0] for line in lines] == ["fig1a", "fig1b", "fig1c", "fig1d"]
    assert "a_v=0.25, c_vh=0.2, c_hv=0.25, G0=20" in lines[1]


def test_report_formulas(capsys):
    assert main(["report-formulas", "fig1c", "--free", "a_v", "c_vh,c_hv"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "R0 = 32.3028 * a_v * sqrt(c_vh * c_hv)"
    assert main(["report-formulas", "fig1c"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "R0 = 98.2814"
    assert main(["report-formulas", "fig1c", "--free", "theta"]) == EXIT_CONFIG


def test_config_errors(tmp_path, out, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("p = 1.5\n")
    assert main(["analyze", str(bad)]) == EXIT_CONFIG
    assert "bad.cfg:1 [p]" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "none.cfg")]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG
    zero = tmp_path / "zero.cfg"
    zero.write_text("c_vh = 0\n")
    assert main(["sensitivity", str(zero), "--target", "r0sq"]) == EXIT_CONFIG


def test_numerical_failure(out, monkeypatch, capsys):
    monkeypatch.setattr(integ, "_MAX_STEPS", 100)
    assert main(["simulate", "fig1b"]) == EXIT_NUMERIC
    assert (out / "fig1b.csv.partial").exists()
    assert "partial" in capsys.readouterr().err


def test_module_entry(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "vhd", "presets", "list"], capture_output=True, text=True, cwd=tmp_path
    )
    assert proc.returncode == 0 and proc.stdout.startswith("fig1a")
