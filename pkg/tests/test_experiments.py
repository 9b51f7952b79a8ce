"""Experiment driver and CLI tests.

Covers:
    - configuration merging precedence and set-pair parsing
    - validation messages for the documented failure cases
    - artifact structure: headers, row counts, boolean/nan rendering,
      lossless float round-trips, manifest contents
    - determinism: rerunning an experiment yields byte-identical CSVs
    - CLI exit codes: 0 on success, 1 on configuration errors, 2 on
      runtime errors
"""

import csv
import json
from pathlib import Path

import pytest

from fblsec import Scenario, Strategy, metrics, sweep_power_pair, u_fp
from fblsec.cli import main
from fblsec.experiments import (
    DEFAULTS,
    EXPERIMENT_IDS,
    ConfigError,
    ExperimentConfig,
    config_from,
    parse_set_pair,
    run,
    validate,
)
from fblsec.fbl_core import from_db


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# ======================================================================
# Configuration merging
# ======================================================================

def test_experiment_ids_are_stable():
    assert EXPERIMENT_IDS == ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7",
                              "theorems")


def test_config_from_precedence():
    cfg = config_from("fig2", {"p_sigma": 5.0, "experiment": "fig2"},
                      {"p_sigma": 7.0, "n": 128})
    assert cfg.experiment_id == "fig2"
    assert cfg.params["p_sigma"] == 7.0
    assert cfg.params["n"] == 128
    assert cfg.params["d_k_values"] == DEFAULTS["fig2"]["d_k_values"]
    assert "experiment" not in cfg.params


def test_parse_set_pair_forms():
    assert parse_set_pair("n=64") == ("n", 64)
    assert parse_set_pair("p_sigma=2.5") == ("p_sigma", 2.5)
    assert parse_set_pair("mode=sic") == ("mode", "sic")
    assert parse_set_pair("flag=true") == ("flag", True)
    assert parse_set_pair("d_k_values=30,60") == ("d_k_values", [30, 60])
    assert parse_set_pair("name=a,b") == ("name", "a,b")
    with pytest.raises(ConfigError):
        parse_set_pair("novalue")
    with pytest.raises(ConfigError):
        parse_set_pair("=3")


# ======================================================================
# Validation
# ======================================================================

def test_validate_accepts_defaults():
    for experiment_id in EXPERIMENT_IDS:
        assert validate(config_from(experiment_id)) == []
    # a bare config with no experiment validates the common keys only
    assert validate(config_from(None)) == []


def test_validate_blocklength_floor():
    problems = validate(config_from("fig3", None, {"n": 5}))
    assert any("n >= 10 required" in p for p in problems)


def test_validate_gain_ordering():
    problems = validate(config_from("fig3", None, {"z_e_db": 1.0}))
    assert any("z_e_db" in p for p in problems)


def test_validate_unknown_experiment_and_keys():
    problems = validate(ExperimentConfig("fig9", {}, None))
    assert len(problems) == 1 and "unknown experiment" in problems[0]
    problems = validate(config_from("fig2", None, {"pm_points": 11}))
    assert any("unknown key 'pm_points'" in p for p in problems)


def test_validate_documented_failures():
    cases = [
        ("fig3", {"d_m": 65}, "d_m"),
        ("fig3", {"sigma2": 0.0}, "sigma2"),
        ("fig3", {"th_ek": 1.5}, "th_ek"),
        ("fig3", {"t_max": 0}, "t_max"),
        ("fig3", {"mode": "other"}, "mode"),
        ("fig3", {"pm_points": 1}, "pm_points"),
        ("fig2", {"resolution": -0.1}, "resolution"),
        ("fig2", {"d_k_values": [30, 90]}, "d_k_values"),
        ("fig4", {"d_m_values": [16, 3.5]}, "d_m_values"),
        ("fig5", {"sweep_stop": 2.0}, "sweep_stop"),
        ("fig5", {"sweep_points": 1}, "sweep_points"),
        ("fig6", {"sweep_start": 0.0}, "sweep_start"),
        ("fig7", {"z_e_db_values": [0.5]}, "z_e_db_values"),
        ("fig7", {"p_sigma_values": [1.0, 0.0]}, "p_sigma_values"),
        ("theorems", {"lemma_points": 2}, "lemma_points"),
    ]
    for experiment_id, override, needle in cases:
        problems = validate(config_from(experiment_id, None, override))
        assert any(needle in p for p in problems), (experiment_id, override, problems)


# ======================================================================
# Running experiments
# ======================================================================

def test_run_requires_experiment_and_output(tmp_path):
    with pytest.raises(ConfigError):
        run(ExperimentConfig(None, {}, str(tmp_path)))
    with pytest.raises(ConfigError):
        run(ExperimentConfig("fig2", {}, None))
    with pytest.raises(ConfigError):
        run(ExperimentConfig("fig2", {"n": 5}, str(tmp_path)))


def test_fig2_artifacts_and_float_round_trip(tmp_path):
    manifest = run(ExperimentConfig("fig2", {"resolution": 1.0}, str(tmp_path)))
    assert manifest.experiment_id == "fig2"
    assert dict(manifest.files) == {"fig2_dk30.csv": 11, "fig2_dk60.csv": 11}
    header, rows = read_csv(tmp_path / "fig2_dk30.csv")
    assert header == ["p_k", "best_p_m", "utility", "feasible"]
    assert len(rows) == 11
    assert set(r[3] for r in rows) <= {"true", "false"}
    # 17-significant-digit rendering round-trips the exact doubles
    scen = Scenario(z_b=1.0, z_e=from_db(-10.0), sigma2=1.0, n=64, d_m=16,
                    p_sigma=10.0)
    sweep = sweep_power_pair(scen, 30.0, 1.0)
    for j, row in enumerate(rows):
        assert float(row[0]) == sweep.p_k[j]
        if row[3] == "true":
            assert float(row[1]) == sweep.best_p_m[j]
            assert float(row[2]) == sweep.utility[j]
        else:
            assert row[1] == "nan" and row[2] == "nan"
    with open(tmp_path / "manifest.json") as fh:
        data = json.load(fh)
    assert data["experiment_id"] == "fig2"
    assert data["config"]["resolution"] == 1.0
    assert {f["name"]: f["rows"] for f in data["files"]} == dict(manifest.files)
    assert data["tool_version"]


def test_rerun_is_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run(ExperimentConfig("fig2", {"resolution": 1.0}, str(out1)))
    run(ExperimentConfig("fig2", {"resolution": 1.0}, str(out2)))
    for name in ("fig2_dk30.csv", "fig2_dk60.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_fig4_summary_structure(tmp_path):
    run(ExperimentConfig("fig4", {"pm_points": 21}, str(tmp_path)))
    header, rows = read_csv(tmp_path / "fig4_summary.csv")
    assert header == ["d_m", "status", "rounds", "d_k", "p_m", "u_fp",
                      "feasible", "rounding", "surface_u_fp", "gap"]
    assert [r[0] for r in rows] == ["16", "24"]
    for row in rows:
        assert row[1] == "Converged"
        assert int(row[2]) <= 20
        assert row[6] == "true"
        assert float(row[3]).is_integer()
    for d_m in (16, 24):
        trace_header, trace_rows = read_csv(tmp_path / f"fig4_trace_dm{d_m}.csv")
        assert trace_header == ["t", "d_k", "p_m", "u_fp"]
        assert [int(r[0]) for r in trace_rows] == list(range(len(trace_rows)))
        us = [float(r[3]) for r in trace_rows]
        assert all(b >= a for a, b in zip(us, us[1:]))


def test_fig5_columns(tmp_path):
    run(ExperimentConfig(
        "fig5", {"sweep_start": -10.0, "sweep_stop": -8.0, "sweep_points": 3},
        str(tmp_path)))
    header, rows = read_csv(tmp_path / "fig5_sensitivity.csv")
    assert header == ["z_e_db", "u_fp", "r_s", "r_d", "baseline_r_s",
                      "d_k", "p_m", "status", "baseline_p_m"]
    assert len(rows) == 3
    assert [float(r[0]) for r in rows] == [-10.0, -9.0, -8.0]
    for row in rows:
        assert row[7] in ("Converged", "MaxIterations", "Infeasible")
        assert 0.0 <= float(row[4]) <= 1.0


def test_rows_reproduce_from_their_inputs(tmp_path):
    # every emitted (u_fp, r_s, r_d) must be recomputable exactly from
    # the row's own (d_k, p_m) through the public evaluation calls
    run(ExperimentConfig(
        "fig5", {"sweep_start": -10.0, "sweep_stop": -8.0, "sweep_points": 3},
        str(tmp_path)))
    _, rows = read_csv(tmp_path / "fig5_sensitivity.csv")
    checked = 0
    for row in rows:
        if row[7] != "Converged":
            continue
        scen = Scenario(z_b=1.0, z_e=from_db(float(row[0])), sigma2=1.0,
                        n=64, d_m=8, p_sigma=3.0)
        d_k, p_m = float(row[5]), float(row[6])
        strat = Strategy(d_k, p_m, scen.p_sigma - p_m)
        r_s, r_d = metrics(scen, strat)
        assert float(row[1]) == u_fp(scen, d_k, p_m), row
        assert float(row[2]) == r_s, row
        assert float(row[3]) == r_d, row
        checked += 1
    assert checked > 0


def test_fig7_flags_infeasible_cells(tmp_path):
    run(ExperimentConfig(
        "fig7", {"z_e_db_values": [-10.0], "p_sigma_values": [0.05, 5.0]},
        str(tmp_path)))
    header, rows = read_csv(tmp_path / "fig7_benchmark.csv")
    assert header == ["z_e_db", "p_sigma_mw", "u_fp", "r_s", "r_d",
                      "baseline_r_s", "infeasible", "d_k", "p_m", "status"]
    by_budget = {float(r[1]): r for r in rows}
    # 0.05 mW cannot carry the 8-bit message reliably: flagged, nan metrics
    assert by_budget[0.05][6] == "true"
    assert by_budget[0.05][2] == "nan"
    assert by_budget[0.05][9] == "Infeasible"
    assert by_budget[5.0][6] == "false"
    assert by_budget[5.0][9] == "Converged"


def test_theorems_report_rows(tmp_path):
    run(ExperimentConfig(
        "theorems",
        {"resolution": 0.5, "pm_points": 21, "lemma_points": 101},
        str(tmp_path)))
    header, rows = read_csv(tmp_path / "theorems_report.csv")
    assert header == ["theorem_id", "case", "points_checked", "violation_count",
                      "max_violation", "passed", "notes"]
    by_case = {(r[0], r[1]): r for r in rows}
    assert set(by_case) == {("T1", "dk30"), ("T1", "dk60"), ("T2", "pm-axis"),
                            ("T3", "dk-axis"), ("L1", "full-power-slice")}
    assert by_case[("T1", "dk30")][5] == "true"
    assert by_case[("T1", "dk60")][5] == "true"
    assert by_case[("T3", "dk-axis")][5] == "true"
    assert by_case[("L1", "full-power-slice")][5] == "true"
    for row in rows:
        assert int(row[2]) > 0
        assert row[5] in ("true", "false")


# ======================================================================
# CLI
# ======================================================================

def test_cli_run_success(tmp_path, capsys):
    code = main(["run", "--experiment", "fig2", "--out", str(tmp_path),
                 "--set", "resolution=1.0"])
    assert code == 0
    out = capsys.readouterr().out
    assert "fig2_dk30.csv" in out and "11 rows" in out
    assert (tmp_path / "fig2_dk60.csv").exists()


def test_cli_validate_ok(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "fig3", "pm_points": 51}))
    assert main(["validate", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_cli_validate_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "fig3", "n": 5}))
    assert main(["validate", "--config", str(cfg)]) == 1
    assert "n >= 10 required" in capsys.readouterr().err


def test_cli_validate_unknown_experiment(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "fig9"}))
    assert main(["validate", "--config", str(cfg)]) == 1
    assert "unknown experiment" in capsys.readouterr().err


def test_cli_config_error_paths(tmp_path, capsys):
    assert main(["run", "--experiment", "fig2", "--out", str(tmp_path),
                 "--set", "resolution"]) == 1
    assert main(["run", "--experiment", "fig2", "--out", str(tmp_path),
                 "--set", "n=5"]) == 1
    missing = tmp_path / "missing.json"
    assert main(["run", "--experiment", "fig2", "--out", str(tmp_path),
                 "--config", str(missing)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["run", "--experiment", "fig2", "--out", str(tmp_path),
                 "--config", str(bad)]) == 1
    capsys.readouterr()


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    code = main(["run", "--experiment", "fig2", "--out", str(blocker / "out"),
                 "--set", "resolution=1.0"])
    assert code == 2
    assert "runtime error" in capsys.readouterr().err


def test_cli_theorems_shorthand(tmp_path, capsys):
    code = main(["theorems", "--out", str(tmp_path),
                 "--set", "resolution=0.5", "--set", "pm_points=21",
                 "--set", "lemma_points=101"])
    assert code == 0
    assert (tmp_path / "theorems_report.csv").exists()
    capsys.readouterr()
