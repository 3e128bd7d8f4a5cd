"""CLI: config validation, report files, golden catalog, determinism."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from causticlab.cli import ConfigError, RunConfig, config_from_args, run, validate
from causticlab.reports import parse_fraction

GOLDEN_TABLE = {
    "A1": ("0", "1"), "A2": ("1/6", "1/3"), "A3": ("1/4", "1/4"),
    "A4": ("3/10", "1/5"), "A5": ("1/3", "1/6"), "A6": ("5/14", "1/7"),
    "A7": ("3/8", "1/8"), "A8": ("7/18", "1/9"),
    "D4-": ("1/3", "1/4"), "D4+": ("1/3", "1/3"), "D5": ("3/8", "1/5"),
    "D6-": ("2/5", "1/6"), "D6+": ("2/5", "1/5"), "D7": ("5/12", "1/7"),
    "D8-": ("3/7", "1/8"), "D8+": ("3/7", "1/7"),
    "E6": ("5/12", "1/6"), "E7": ("4/9", "1/7"), "E8": ("7/15", "1/8"),
}


def _row_label(family, index, sign):
    m = int(index)
    if family == "A":
        return f"A{m + 1}"
    if family == "Dminus":
        return f"D{m + 1}-"
    if family == "Dplus":
        return f"D{m + 1}+"
    if family == "D":
        return f"D{m + 1}"
    return f"E{m}"


def test_catalog_dump_golden(tmp_path):
    cfg = RunConfig(experiment="catalog_dump", out_dir=str(tmp_path))
    assert run(cfg) == 0
    lines = (tmp_path / "catalog.csv").read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header == ["family", "index", "sign", "k", "k0", "r", "s", "kappa", "delta0"]
    seen = {}
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        label = _row_label(row["family"], row["index"], row["sign"])
        seen[label] = (row["kappa"], row["delta0"])
        # kappa must equal k/2 - sum(r) recomputed from the row itself
        r = [parse_fraction(tok) for tok in row["r"].split(";")]
        assert parse_fraction(row["kappa"]) == Fraction(int(row["k"]), 2) - sum(r)
    assert seen == GOLDEN_TABLE


def test_invalid_delta_exits_2(tmp_path):
    cfg = RunConfig(experiment="supnorm", delta=1.5, out_dir=str(tmp_path))
    assert run(cfg) == 2
    assert not (tmp_path / "scan.csv").exists()  # no computation happened


def test_invalid_type_exits_2(tmp_path):
    cfg = RunConfig(experiment="supnorm", singularity="Z9", out_dir=str(tmp_path))
    assert run(cfg) == 2


def test_validate_reports_field():
    with pytest.raises(ConfigError) as e:
        validate(RunConfig(experiment="supnorm", h_points=2))
    assert e.value.fieldname == "h_points"


def test_config_round_trip():
    cfg = RunConfig(experiment="threshold_sweep", singularity="A3",
                    deltas=(0.1, 0.2), h_points=6, seed=11)
    assert RunConfig.from_dict(cfg.as_dict()) == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"experiment": "supnorm", "bogus_field": 1})


def test_summary_config_echo_round_trips(tmp_path):
    cfg = RunConfig(experiment="supnorm", singularity="A2",
                    h_start=2.0**-4, h_stop=2.0**-8, h_points=5,
                    out_dir=str(tmp_path), seed=3)
    run(cfg)
    echo = json.loads((tmp_path / "summary.json").read_text())["config"]
    assert RunConfig.from_dict(echo) == cfg


def test_flag_parsing_overrides():
    cfg = config_from_args(["supnorm", "--type", "A3", "--delta", "0.2",
                            "--h-points", "7", "--out", "/tmp/x",
                            "--workers", "2", "--seed", "5"])
    assert cfg.experiment == "supnorm"
    assert cfg.singularity == "A3"
    assert cfg.delta == 0.2
    assert cfg.h_points == 7
    assert cfg.workers == 2


def test_config_file_then_flags_win(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"singularity": "A4", "h_points": 6, "seed": 9}))
    cfg = config_from_args(["supnorm", "--config", str(cfg_file),
                            "--type", "A2", "--out", str(tmp_path)])
    assert cfg.singularity == "A2"  # flag wins
    assert cfg.h_points == 6        # file value survives
    assert cfg.seed == 9


def test_supnorm_run_writes_reports_and_passes(tmp_path):
    cfg = RunConfig(experiment="supnorm", singularity="A2",
                    h_start=2.0**-6, h_stop=2.0**-12, h_points=6,
                    out_dir=str(tmp_path))
    assert run(cfg) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["fit"]["verdict"] == "pass"
    assert summary["fit"]["reference"] == "1/6"
    lines = (tmp_path / "scan.csv").read_text().strip().splitlines()
    assert lines[0] == "h,lambda,y_index,abs_I,est_error,converged"
    assert len(lines) == 7


def test_repeat_run_byte_identical(tmp_path):
    cfg = RunConfig(experiment="supnorm", singularity="A2",
                    h_start=2.0**-4, h_stop=2.0**-8, h_points=5,
                    x_strategy="omega_shells", points_per_shell=2,
                    out_dir=str(tmp_path / "rep"), seed=7)
    run(cfg)
    first = {p.name: p.read_bytes()
             for p in sorted((tmp_path / "rep").iterdir()) if p.suffix != ".log"}
    run(cfg)
    second = {p.name: p.read_bytes()
              for p in sorted((tmp_path / "rep").iterdir()) if p.suffix != ".log"}
    assert first == second


def test_workers_do_not_change_bytes(tmp_path):
    outs = {}
    for workers in (1, 2):
        out = tmp_path / f"w{workers}"
        cfg = RunConfig(experiment="supnorm", singularity="A2",
                        h_start=2.0**-4, h_stop=2.0**-8, h_points=5,
                        workers=workers, out_dir=str(out), seed=1)
        assert run(cfg) in (0, 1)
        outs[workers] = (out / "scan.csv").read_bytes()
    assert outs[1] == outs[2]


def test_lemma62_run(tmp_path):
    cfg = RunConfig(experiment="lemma62", out_dir=str(tmp_path))
    assert run(cfg) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["max_rel_error"] < 1e-6


def test_sweep_run_marks_exploratory(tmp_path):
    cfg = RunConfig(experiment="threshold_sweep", singularity="A2",
                    deltas=(0.2, 0.8), h_start=2.0**-5, h_stop=2.0**-10,
                    h_points=5, out_dir=str(tmp_path))
    status = run(cfg)
    assert status == 0  # only the non-exploratory entry must pass
    lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
    rows = [dict(zip(lines[0].split(","), ln.split(","))) for ln in lines[1:]]
    assert rows[0]["exploratory"] == "false"
    assert rows[1]["exploratory"] == "true"


def test_torus_ball_run(tmp_path):
    cfg = RunConfig(experiment="torus", torus_mode="ball", torus_n=2,
                    torus_delta=0.45, torus_delta_prime=0.5,
                    j_min=2**10, j_max=2**22, out_dir=str(tmp_path))
    assert run(cfg) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert abs(summary["ratio_exponent"] - 0.5) <= 0.05


def test_cli_entry_point_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "causticlab.cli", "catalog", "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "catalog.csv").exists()
    bad = subprocess.run(
        [sys.executable, "-m", "causticlab.cli", "supnorm", "--delta", "1.5"],
        capture_output=True, text=True)
    assert bad.returncode == 2
    assert "delta" in bad.stderr
