"""Experiment driver: configuration, execution, CSV artifacts.

Seven named experiments cover the full evaluation of the two-packet
design; ids are stable interface names:
    fig2     exhaustive conditional power optima per key-power column at
             two fixed key lengths (the budget-boundary claim's data)
    fig3     full-power utility surface with feasibility flags
    fig4     alternating-optimization traces for two message sizes, each
             with its surface and a final-vs-surface summary
    fig5     sensitivity to the eavesdropper gain: optimized utility,
             security and deception rates, key-less baseline
    fig6     sensitivity to the total power budget at fixed gains
    fig7     benchmark grid over (eavesdropper gain, budget) pairs with
             infeasibility flags
    theorems brute-force claim reports (T1, L1, T2, T3) plus their data

Configuration is a flat key/value dict: package defaults, overridden by
an optional JSON file, overridden by explicit set-pairs. Powers are mW
and gains are dB at this boundary and converted to linear scale
internally. All CSV output uses a header row, '.' decimals, 17
significant digits, booleans as true/false and missing values as nan,
so reruns with equal configuration are byte-identical; the run manifest
(which carries the only timestamp) is written separately.

Provides:
    ExperimentConfig, RunManifest, ConfigError
    config_from(experiment_id, file_params, set_params, output_dir)
    validate(config) -> list of problem strings
    run(config) -> RunManifest
    EXPERIMENT_IDS, DEFAULTS
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .fbl_core import from_db
from .link_model import Mode, Scenario, Thresholds, metrics, u_fp
from .optimizer import BcdConfig, baseline_optimize, bcd_optimize
from .oracle import full_surface, sweep_power_pair, verify_concavity, verify_lemma1, verify_theorem1


class ConfigError(ValueError):
    """A configuration cannot be parsed or fails validation."""


# ======================================================================
# Defaults
# ======================================================================

_COMMON_DEFAULTS = {
    "z_b_db": 0.0,
    "sigma2": 1.0,
    "n": 64,
    "th_bm": 0.5,
    "th_em": 0.5,
    "th_bk": 0.5,
    "th_ek": 0.5,
    "xi": 2e-16,
    "t_max": 100,
    "subproblem_tol": 3e-4,
    "init_grid": 64,
    "mode": "sic",
}

DEFAULTS = {
    "fig2": {
        **_COMMON_DEFAULTS,
        "z_e_db": -10.0, "p_sigma": 10.0, "d_m": 16,
        "d_k_values": [30, 60], "resolution": 0.05,
    },
    "fig3": {
        **_COMMON_DEFAULTS,
        "z_e_db": -10.0, "p_sigma": 10.0, "d_m": 16,
        "pm_points": 201,
    },
    "fig4": {
        **_COMMON_DEFAULTS,
        "z_e_db": -10.0, "p_sigma": 10.0, "d_m": 16,
        "d_m_values": [16, 24], "pm_points": 201,
    },
    "fig5": {
        **_COMMON_DEFAULTS,
        "z_e_db": -10.0, "p_sigma": 3.0, "d_m": 8,
        "sweep_start": -10.0, "sweep_stop": -1.0, "sweep_points": 101,
    },
    "fig6": {
        **_COMMON_DEFAULTS,
        "z_e_db": -5.0, "p_sigma": 10.0, "d_m": 8,
        "sweep_start": 0.5, "sweep_stop": 10.0, "sweep_points": 101,
    },
    "fig7": {
        **_COMMON_DEFAULTS,
        "z_e_db": -10.0, "p_sigma": 10.0, "d_m": 8,
        "z_e_db_values": [-10.0, -8.0, -6.0, -5.0, -4.0, -3.0],
        "p_sigma_values": [0.5 * k for k in range(1, 21)],
    },
    "theorems": {
        **_COMMON_DEFAULTS,
        "z_e_db": -10.0, "p_sigma": 10.0, "d_m": 16,
        "d_k_values": [30, 60], "resolution": 0.05,
        "pm_points": 201, "lemma_points": 10001,
    },
}

EXPERIMENT_IDS = tuple(sorted(DEFAULTS))

_MODES = ("sic", "exact", "approx")


# ======================================================================
# Configuration
# ======================================================================

@dataclass(frozen=True)
class ExperimentConfig:
    """A resolved experiment request.

    params holds the full flat key/value map after merging defaults,
    file values and set-pairs. experiment_id may be None only while
    validating a bare config file that does not name an experiment.
    """

    experiment_id: Optional[str]
    params: dict
    output_dir: Optional[str] = None


@dataclass(frozen=True)
class RunManifest:
    """What a run produced: config echo, version, files with row counts."""

    experiment_id: str
    tool_version: str
    timestamp: str
    config: dict
    files: Tuple[Tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "config": self.config,
            "files": [{"name": n, "rows": r} for n, r in self.files],
        }


def config_from(experiment_id: Optional[str], file_params: Optional[dict] = None,
                set_params: Optional[dict] = None,
                output_dir: Optional[str] = None) -> ExperimentConfig:
    """Merge defaults, config-file values and set-pair overrides."""
    file_params = dict(file_params or {})
    file_params.pop("experiment", None)
    if experiment_id is not None and experiment_id in DEFAULTS:
        params = dict(DEFAULTS[experiment_id])
    else:
        params = dict(_COMMON_DEFAULTS)
    params.update(file_params)
    params.update(set_params or {})
    return ExperimentConfig(experiment_id=experiment_id, params=params,
                            output_dir=output_dir)


def parse_set_pair(pair: str) -> Tuple[str, object]:
    """Parse one 'key=value' override; values are JSON, comma lists of
    JSON scalars, or plain strings."""
    if "=" not in pair:
        raise ConfigError(f"set override {pair!r} is not of the form key=value")
    key, raw = pair.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"set override {pair!r} has an empty key")
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        pass
    if "," in raw:
        try:
            return key, [json.loads(part) for part in raw.split(",")]
        except json.JSONDecodeError:
            pass
    return key, raw


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number_list(v) -> bool:
    return isinstance(v, (list, tuple)) and len(v) > 0 and all(_is_number(x) for x in v)


def validate(config: ExperimentConfig) -> list:
    """All configuration problems, as human-readable strings, no running.

    An empty list means the configuration is valid. Unknown keys, type
    mismatches and physical-range violations are each reported on their
    own line.
    """
    problems = []
    p = config.params
    if config.experiment_id is not None and config.experiment_id not in DEFAULTS:
        return [f"unknown experiment {config.experiment_id!r}; "
                f"expected one of {', '.join(EXPERIMENT_IDS)}"]
    known = DEFAULTS[config.experiment_id] if config.experiment_id else _COMMON_DEFAULTS
    for key in sorted(set(p) - set(known)):
        problems.append(f"unknown key {key!r} for "
                        f"experiment {config.experiment_id or '(none)'}")

    def num(key, positive=False, strict_int=False):
        v = p.get(key)
        if v is None:
            return None
        if not _is_number(v) or (strict_int and not _is_int(v)):
            problems.append(f"{key} must be a finite {'integer' if strict_int else 'number'}, got {v!r}")
            return None
        if positive and v <= 0:
            problems.append(f"{key} must be > 0, got {v!r}")
            return None
        return v

    n = num("n", strict_int=True)
    if n is not None and n < 10:
        problems.append(f"n >= 10 required, got {n}")
    d_m = num("d_m", strict_int=True)
    if d_m is not None and n is not None and not 1 <= d_m <= n:
        problems.append(f"d_m must lie in [1, n]={n}, got {d_m}")
    num("sigma2", positive=True)
    num("p_sigma", positive=True)
    z_b_db = num("z_b_db")
    z_e_db = num("z_e_db")
    if z_b_db is not None and z_e_db is not None and z_e_db > z_b_db:
        problems.append(
            f"z_e_db must not exceed z_b_db (secrecy needs the legitimate channel "
            f"at least as strong), got {z_e_db} > {z_b_db}")
    for key in ("th_bm", "th_em", "th_bk", "th_ek"):
        v = num(key)
        if v is not None and not 0.0 < v < 1.0:
            problems.append(f"{key} must lie in (0, 1), got {v}")
    num("xi", positive=True)
    t_max = num("t_max", strict_int=True)
    if t_max is not None and t_max < 1:
        problems.append(f"t_max must be >= 1, got {t_max}")
    num("subproblem_tol", positive=True)
    init_grid = num("init_grid", strict_int=True)
    if init_grid is not None and init_grid < 2:
        problems.append(f"init_grid must be >= 2, got {init_grid}")
    if "mode" in p and p["mode"] not in _MODES:
        problems.append(f"mode must be one of {_MODES}, got {p['mode']!r}")

    if "resolution" in known:
        num("resolution", positive=True)
    if "d_k_values" in known:
        v = p.get("d_k_values")
        if not _is_number_list(v):
            problems.append(f"d_k_values must be a non-empty list of numbers, got {v!r}")
        elif n is not None and any(not 0 <= d <= n for d in v):
            problems.append(f"d_k_values must lie in [0, n]={n}, got {v}")
    if "d_m_values" in known:
        v = p.get("d_m_values")
        if not _is_number_list(v) or not all(_is_int(x) for x in v):
            problems.append(f"d_m_values must be a non-empty list of integers, got {v!r}")
        elif n is not None and any(not 1 <= d <= n for d in v):
            problems.append(f"d_m_values must lie in [1, n]={n}, got {v}")
    if "pm_points" in known:
        v = num("pm_points", strict_int=True)
        if v is not None and v < 2:
            problems.append(f"pm_points must be >= 2, got {v}")
    if "lemma_points" in known:
        v = num("lemma_points", strict_int=True)
        if v is not None and v < 3:
            problems.append(f"lemma_points must be >= 3, got {v}")
    if "sweep_points" in known:
        v = num("sweep_points", strict_int=True)
        if v is not None and v < 2:
            problems.append(f"sweep_points must be >= 2, got {v}")
        start, stop = num("sweep_start"), num("sweep_stop")
        if start is not None and stop is not None:
            if start > stop:
                problems.append(f"sweep_start must not exceed sweep_stop, got {start} > {stop}")
            if config.experiment_id == "fig5" and z_b_db is not None and stop > z_b_db:
                problems.append(
                    f"fig5 sweeps the eavesdropper gain; sweep_stop must not exceed "
                    f"z_b_db={z_b_db}, got {stop}")
            if config.experiment_id == "fig6" and start <= 0:
                problems.append(f"fig6 sweeps the power budget; sweep_start must be > 0, got {start}")
    if "z_e_db_values" in known:
        v = p.get("z_e_db_values")
        if not _is_number_list(v):
            problems.append(f"z_e_db_values must be a non-empty list of numbers, got {v!r}")
        elif z_b_db is not None and any(x > z_b_db for x in v):
            problems.append(f"z_e_db_values must not exceed z_b_db={z_b_db}, got {v}")
    if "p_sigma_values" in known:
        v = p.get("p_sigma_values")
        if not _is_number_list(v):
            problems.append(f"p_sigma_values must be a non-empty list of numbers, got {v!r}")
        elif any(x <= 0 for x in v):
            problems.append(f"p_sigma_values must all be > 0, got {v}")
    return problems


# ======================================================================
# Builders
# ======================================================================

def _scenario(p: dict, z_e_db: Optional[float] = None,
              p_sigma: Optional[float] = None, d_m: Optional[int] = None) -> Scenario:
    return Scenario(
        z_b=from_db(p["z_b_db"]),
        z_e=from_db(p["z_e_db"] if z_e_db is None else z_e_db),
        sigma2=p["sigma2"],
        n=p["n"],
        d_m=p["d_m"] if d_m is None else d_m,
        p_sigma=p["p_sigma"] if p_sigma is None else p_sigma,
        thresholds=Thresholds(
            eps_bm_th=p["th_bm"], eps_em_th=p["th_em"],
            eps_bk_th=p["th_bk"], eps_ek_th=p["th_ek"],
        ),
    )


def _bcd_config(p: dict) -> BcdConfig:
    return BcdConfig(
        xi=p["xi"], t_max=p["t_max"], subproblem_tol=p["subproblem_tol"],
        init_grid=p["init_grid"], mode=p["mode"],
    )


def _write_csv(path: Path, header: Sequence[str], rows) -> int:
    """Write one CSV artifact; returns the data row count.

    Floats are rendered with 17 significant digits so that exact values
    round-trip; booleans as true/false; missing values as nan.
    """
    def fmt(v):
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return f"{float(v):.17g}"
        return str(v)

    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
            count += 1
    return count


# ======================================================================
# Runners
# ======================================================================

def _run_fig2(p: dict, outdir: Path):
    scen = _scenario(p)
    files = []
    for d_k in p["d_k_values"]:
        sweep = sweep_power_pair(scen, float(d_k), p["resolution"], p["mode"])
        rows = (
            (sweep.p_k[j], sweep.best_p_m[j], sweep.utility[j], bool(sweep.feasible[j]))
            for j in range(sweep.p_k.size)
        )
        name = f"fig2_dk{d_k:g}.csv"
        files.append((name, _write_csv(outdir / name,
                                       ("p_k", "best_p_m", "utility", "feasible"), rows)))
    return files


def _surface_rows(scen, surface, modes_extra=()):
    """Row-major (p_m outer) rows of a surface, with optional extra
    utility columns recomputed per mode."""
    extras = []
    for mode in modes_extra:
        cols = np.empty_like(surface.u)
        for i, d_k in enumerate(surface.axis_dk):
            cols[i, :] = u_fp(scen, float(d_k), surface.axis_pm, mode)
        extras.append(cols)
    for j in range(surface.axis_pm.size):
        for i in range(surface.axis_dk.size):
            row = [surface.axis_pm[j], surface.axis_dk[i], surface.u[i, j],
                   bool(surface.feasible[i, j])]
            row.extend(extra[i, j] for extra in extras)
            yield tuple(row)


def _run_fig3(p: dict, outdir: Path):
    scen = _scenario(p)
    surface = full_surface(scen, p["pm_points"], None, p["mode"])
    name = "fig3_surface.csv"
    rows = _surface_rows(scen, surface, modes_extra=("exact", "approx"))
    count = _write_csv(outdir / name,
                       ("p_m", "d_k", "u_fp", "feasible", "u_fp_exact", "u_fp_approx"),
                       rows)
    return [(name, count)]


def _run_fig4(p: dict, outdir: Path):
    files = []
    summary = []
    for d_m in p["d_m_values"]:
        scen = _scenario(p, d_m=d_m)
        trace = bcd_optimize(scen, _bcd_config(p))
        tname = f"fig4_trace_dm{d_m:g}.csv"
        files.append((tname, _write_csv(
            outdir / tname, ("t", "d_k", "p_m", "u_fp"),
            ((it.t, it.d_k, it.p_m, it.u_fp) for it in trace.iterations))))
        surface = full_surface(scen, p["pm_points"], None, p["mode"])
        sname = f"fig4_surface_dm{d_m:g}.csv"
        files.append((sname, _write_csv(
            outdir / sname, ("p_m", "d_k", "u_fp", "feasible"),
            _surface_rows(scen, surface))))
        best_u = surface.argmax[2] if surface.argmax else float("nan")
        if trace.final is not None:
            gap = abs(trace.final_utility - best_u)
            summary.append((d_m, trace.status, len(trace.iterations) - 1,
                            trace.final.d_k, trace.final.p_m, trace.final_utility,
                            trace.final_feasible, trace.rounding, best_u, gap))
        else:
            summary.append((d_m, trace.status, 0, float("nan"), float("nan"),
                            float("nan"), False, "", best_u, float("nan")))
    files.append(("fig4_summary.csv", _write_csv(
        outdir / "fig4_summary.csv",
        ("d_m", "status", "rounds", "d_k", "p_m", "u_fp",
         "feasible", "rounding", "surface_u_fp", "gap"),
        summary)))
    return files


def _run_fig5(p: dict, outdir: Path):
    grid = np.linspace(p["sweep_start"], p["sweep_stop"], p["sweep_points"])
    rows = []
    for z_db in grid:
        scen = _scenario(p, z_e_db=float(z_db))
        trace = bcd_optimize(scen, _bcd_config(p))
        base_p_m, base_r_s = baseline_optimize(scen)
        if trace.final is None or trace.status == "Infeasible":
            rows.append((z_db, float("nan"), float("nan"), float("nan"), base_r_s,
                         float("nan"), float("nan"), trace.status, base_p_m))
        else:
            r_s, r_d = metrics(scen, trace.final, p["mode"])
            rows.append((z_db, trace.final_utility, r_s, r_d, base_r_s,
                         trace.final.d_k, trace.final.p_m, trace.status, base_p_m))
    name = "fig5_sensitivity.csv"
    return [(name, _write_csv(outdir / name,
                              ("z_e_db", "u_fp", "r_s", "r_d", "baseline_r_s",
                               "d_k", "p_m", "status", "baseline_p_m"), rows))]


def _run_fig6(p: dict, outdir: Path):
    grid = np.linspace(p["sweep_start"], p["sweep_stop"], p["sweep_points"])
    rows = []
    for p_sig in grid:
        scen = _scenario(p, p_sigma=float(p_sig))
        trace = bcd_optimize(scen, _bcd_config(p))
        base_p_m, base_r_s = baseline_optimize(scen)
        if trace.final is None or trace.status == "Infeasible":
            rows.append((p_sig, float("nan"), float("nan"), float("nan"), base_r_s,
                         float("nan"), float("nan"), trace.status, base_p_m))
        else:
            r_s, r_d = metrics(scen, trace.final, p["mode"])
            rows.append((p_sig, trace.final_utility, r_s, r_d, base_r_s,
                         trace.final.d_k, trace.final.p_m, trace.status, base_p_m))
    name = "fig6_budget.csv"
    return [(name, _write_csv(outdir / name,
                              ("p_sigma_mw", "u_fp", "r_s", "r_d", "baseline_r_s",
                               "d_k", "p_m", "status", "baseline_p_m"), rows))]


def _run_fig7(p: dict, outdir: Path):
    rows = []
    for z_db in p["z_e_db_values"]:
        for p_sig in p["p_sigma_values"]:
            scen = _scenario(p, z_e_db=float(z_db), p_sigma=float(p_sig))
            trace = bcd_optimize(scen, _bcd_config(p))
            base_p_m, base_r_s = baseline_optimize(scen)
            infeasible = trace.status == "Infeasible" or trace.final is None
            if infeasible:
                rows.append((z_db, p_sig, float("nan"), float("nan"), float("nan"),
                             base_r_s, True, float("nan"), float("nan"), trace.status))
            else:
                r_s, r_d = metrics(scen, trace.final, p["mode"])
                rows.append((z_db, p_sig, trace.final_utility, r_s, r_d, base_r_s,
                             False, trace.final.d_k, trace.final.p_m, trace.status))
    name = "fig7_benchmark.csv"
    return [(name, _write_csv(outdir / name,
                              ("z_e_db", "p_sigma_mw", "u_fp", "r_s", "r_d",
                               "baseline_r_s", "infeasible", "d_k", "p_m", "status"),
                              rows))]


def _run_theorems(p: dict, outdir: Path):
    scen = _scenario(p)
    files = []
    reports = []
    for d_k in p["d_k_values"]:
        sweep = sweep_power_pair(scen, float(d_k), p["resolution"], p["mode"])
        name = f"theorems_sweep_dk{d_k:g}.csv"
        files.append((name, _write_csv(
            outdir / name, ("p_k", "best_p_m", "utility", "feasible"),
            ((sweep.p_k[j], sweep.best_p_m[j], sweep.utility[j], bool(sweep.feasible[j]))
             for j in range(sweep.p_k.size)))))
        reports.append((verify_theorem1(sweep), f"dk{d_k:g}"))
    surface = full_surface(scen, p["pm_points"], None, p["mode"])
    files.append(("theorems_surface.csv", _write_csv(
        outdir / "theorems_surface.csv", ("p_m", "d_k", "u_fp", "feasible"),
        _surface_rows(scen, surface))))
    reports.append((verify_concavity(surface, "p_m"), "pm-axis"))
    reports.append((verify_concavity(surface, "d_k"), "dk-axis"))
    reports.append((verify_lemma1(scen, p["lemma_points"]), "full-power-slice"))
    rows = []
    for report, case in reports:
        max_violation = max((v[1] for v in report.violations), default=0.0)
        rows.append((report.theorem_id, case, report.points_checked,
                     len(report.violations), max_violation, report.passed,
                     report.notes))
    files.append(("theorems_report.csv", _write_csv(
        outdir / "theorems_report.csv",
        ("theorem_id", "case", "points_checked", "violation_count",
         "max_violation", "passed", "notes"), rows)))
    return files


_RUNNERS = {
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "theorems": _run_theorems,
}


# ======================================================================
# Entry point
# ======================================================================

def run(config: ExperimentConfig) -> RunManifest:
    """Run one experiment and write its CSV artifacts plus manifest.

    Args:
        config: resolved configuration; must name an experiment and an
            output directory and pass validate().

    Returns:
        RunManifest echoing the effective configuration and listing
        every emitted file with its row count.

    Raises:
        ConfigError: the configuration is invalid.
        OSError: the output directory cannot be created or written.
    """
    if config.experiment_id is None:
        raise ConfigError("no experiment named; pass one of "
                          + ", ".join(EXPERIMENT_IDS))
    if config.output_dir is None:
        raise ConfigError("no output directory configured")
    if config.experiment_id in DEFAULTS:
        merged = dict(DEFAULTS[config.experiment_id])
        merged.update(config.params)
        config = ExperimentConfig(experiment_id=config.experiment_id,
                                  params=merged, output_dir=config.output_dir)
    problems = validate(config)
    if problems:
        raise ConfigError("; ".join(problems))
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = _RUNNERS[config.experiment_id](config.params, outdir)
    manifest = RunManifest(
        experiment_id=config.experiment_id,
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        config=dict(config.params),
        files=tuple(files),
    )
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
