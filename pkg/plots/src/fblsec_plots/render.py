"""Renderers: validated CSV tables in, PNG plus JSON sidecar out.

One renderer per figure id. Every image gets a sidecar summary with the
same stem: {"figure", "image", "panels": [{"name", "series": [{"name",
"points"}]}], "annotations"} where points counts the finite plotted
values of that series. fig4 sidecars additionally carry
"path_overlay": true because the search path is drawn on top of its
surface. A figure whose inputs contain no finite point at all is still
rendered, with an "infeasible" annotation, and reports zero-point
series rather than failing.

Provides:
    RENDERERS: dict figure id -> renderer(inputs, out_dir) -> [files]
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import FigureInputs, Table

_RATE_SERIES = ("u_fp", "r_s", "r_d", "baseline_r_s")


# ======================================================================
# Shared helpers
# ======================================================================

def _series(name: str, *arrays: np.ndarray) -> dict:
    """Series descriptor; points counts rows finite in every array."""
    finite = np.ones(arrays[0].shape, dtype=bool)
    for arr in arrays:
        finite &= np.isfinite(arr)
    return {"name": name, "points": int(finite.sum())}


def _total_points(panels: List[dict]) -> int:
    return sum(s["points"] for panel in panels for s in panel["series"])


def _mark_infeasible(ax) -> None:
    ax.text(0.5, 0.5, "infeasible", transform=ax.transAxes, ha="center",
            va="center", fontsize=18, color="crimson")


def _write(fig, out_dir: Path, stem: str, summary: dict) -> List[str]:
    image = f"{stem}.png"
    sidecar = f"{stem}.json"
    fig.savefig(out_dir / image, dpi=150)
    plt.close(fig)
    summary = dict(summary, image=image)
    with open(out_dir / sidecar, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [image, sidecar]


def _surface_grids(table: Table) -> Tuple[np.ndarray, np.ndarray,
                                          np.ndarray, np.ndarray]:
    """Long-form surface rows back to (pm axis, dk axis, U, feasible)."""
    pm_axis = np.unique(table.col("p_m"))
    dk_axis = np.unique(table.col("d_k"))
    u = np.full((dk_axis.size, pm_axis.size), np.nan)
    feasible = np.zeros((dk_axis.size, pm_axis.size), dtype=bool)
    i = np.searchsorted(dk_axis, table.col("d_k"))
    j = np.searchsorted(pm_axis, table.col("p_m"))
    u[i, j] = table.col("u_fp")
    feasible[i, j] = table.col("feasible")
    return pm_axis, dk_axis, u, feasible


def _draw_surface(ax, table: Table, colorbar_label: str):
    """Utility heatmap with the feasible region at full opacity."""
    pm_axis, dk_axis, u, feasible = _surface_grids(table)
    finite = np.isfinite(u)
    mesh = None
    if finite.any():
        vmin, vmax = float(np.nanmin(u)), float(np.nanmax(u))
        ax.pcolormesh(pm_axis, dk_axis, u, shading="nearest",
                      vmin=vmin, vmax=vmax, alpha=0.25)
        u_feasible = np.where(feasible, u, np.nan)
        mesh = ax.pcolormesh(pm_axis, dk_axis, u_feasible, shading="nearest",
                             vmin=vmin, vmax=vmax)
    else:
        _mark_infeasible(ax)
    ax.set_xlabel("message power (mW)")
    ax.set_ylabel("key length (bits)")
    if mesh is not None:
        plt.colorbar(mesh, ax=ax, label=colorbar_label)
    return _series("u_fp", np.where(feasible, u, np.nan))


# ======================================================================
# Figure renderers
# ======================================================================

def render_fig2(inputs: FigureInputs, out_dir: Path) -> List[str]:
    """Two panels over the key-power grid: the conditional message-power
    optimum (markers on the full-power boundary) and its utility."""
    fig, (ax_power, ax_utility) = plt.subplots(
        2, 1, figsize=(7.0, 8.0), sharex=True)
    power_series, utility_series = [], []
    p_sigma = 0.0
    for label, table in sorted(inputs.tables.items()):
        p_k = table.col("p_k")
        p_sigma = max(p_sigma, float(np.nanmax(p_k)))
        ax_power.plot(p_k, table.col("best_p_m"), marker="o", markersize=3,
                      label=label)
        ax_utility.plot(p_k, table.col("utility"), marker="o", markersize=3,
                        label=label)
        power_series.append(_series(label, p_k, table.col("best_p_m")))
        utility_series.append(_series(label, p_k, table.col("utility")))
    boundary = np.linspace(0.0, p_sigma, 101)
    ax_power.plot(boundary, p_sigma - boundary, linestyle="--",
                  color="0.5", label="full-power boundary")
    ax_power.set_ylabel("optimal message power (mW)")
    ax_utility.set_ylabel("system utility")
    ax_utility.set_xlabel("key power (mW)")
    panels = [
        {"name": "conditional-power-optimum", "series": power_series},
        {"name": "conditional-utility", "series": utility_series},
    ]
    annotations = ["full-power-boundary-reference"]
    if _total_points(panels) == 0:
        _mark_infeasible(ax_power)
        _mark_infeasible(ax_utility)
        annotations.append("infeasible")
    else:
        ax_power.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _write(fig, out_dir, "fig2", {
        "figure": "fig2", "panels": panels, "annotations": annotations})


def render_fig3(inputs: FigureInputs, out_dir: Path) -> List[str]:
    """Full-power utility surface; infeasible cells at reduced opacity."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    series = _draw_surface(ax, inputs.tables["fig3"], "system utility")
    ax.set_title("full-power utility surface")
    panels = [{"name": "utility-surface", "series": [series]}]
    annotations = ["feasible-region-higher-opacity"]
    if _total_points(panels) == 0:
        annotations.append("infeasible")
    fig.tight_layout()
    return _write(fig, out_dir, "fig3", {
        "figure": "fig3", "panels": panels, "annotations": annotations})


def render_fig4(inputs: FigureInputs, out_dir: Path) -> List[str]:
    """One image per message size: utility surface with the alternating
    optimization's search path drawn on top."""
    written = []
    suffixes = sorted(key[len("trace_"):] for key in inputs.tables
                      if key.startswith("trace_"))
    for suffix in suffixes:
        trace = inputs.tables[f"trace_{suffix}"]
        surface = inputs.tables[f"surface_{suffix}"]
        fig, ax = plt.subplots(figsize=(7.0, 5.0))
        surface_series = _draw_surface(ax, surface, "system utility")
        p_m, d_k = trace.col("p_m"), trace.col("d_k")
        ax.plot(p_m, d_k, color="crimson", marker="o", markersize=4,
                linewidth=1.5, label="search path")
        if len(trace) > 0:
            ax.plot(p_m[:1], d_k[:1], marker="s", markersize=9,
                    color="white", markeredgecolor="crimson")
            ax.plot(p_m[-1:], d_k[-1:], marker="*", markersize=14,
                    color="gold", markeredgecolor="black")
        ax.set_title(f"search path, {suffix}")
        ax.legend(loc="best", fontsize=8)
        panels = [
            {"name": "utility-surface", "series": [surface_series]},
            {"name": "search-path",
             "series": [_series("optimization-path", p_m, d_k)]},
        ]
        annotations = []
        if _total_points(panels) == 0:
            _mark_infeasible(ax)
            annotations.append("infeasible")
        fig.tight_layout()
        written += _write(fig, out_dir, f"fig4_{suffix}", {
            "figure": "fig4", "panels": panels, "annotations": annotations,
            "path_overlay": True})
    return written


def _render_rates(inputs: FigureInputs, out_dir: Path, key: str,
                  x_name: str, x_label: str, panel_name: str) -> List[str]:
    """Shared fig5/fig6 layout: three rates on the left axis and the
    optimized utility on a twin right axis, all four in one panel."""
    table = inputs.tables[key]
    x = table.col(x_name)
    fig, ax_rate = plt.subplots(figsize=(7.0, 5.0))
    ax_util = ax_rate.twinx()
    series = []
    handles = []
    for name in _RATE_SERIES:
        y = table.col(name)
        target = ax_util if name == "u_fp" else ax_rate
        style = dict(linestyle="--") if name == "u_fp" else {}
        (line,) = target.plot(x, y, marker=".", label=name, **style)
        handles.append(line)
        series.append(_series(name, x, y))
    ax_rate.set_xlabel(x_label)
    ax_rate.set_ylabel("rate")
    ax_util.set_ylabel("optimized utility")
    panels = [{"name": panel_name, "series": series}]
    annotations = []
    if _total_points(panels) == 0:
        _mark_infeasible(ax_rate)
        annotations.append("infeasible")
    else:
        ax_rate.legend(handles=handles, loc="best", fontsize=8)
    fig.tight_layout()
    return _write(fig, out_dir, key, {
        "figure": key, "panels": panels, "annotations": annotations})


def render_fig5(inputs: FigureInputs, out_dir: Path) -> List[str]:
    """Sensitivity to the eavesdropper gain: four series, one panel."""
    return _render_rates(inputs, out_dir, "fig5", "z_e_db",
                         "eavesdropper gain (dB)", "gain-sensitivity")


def render_fig6(inputs: FigureInputs, out_dir: Path) -> List[str]:
    """Sensitivity to the power budget: four series, one panel."""
    return _render_rates(inputs, out_dir, "fig6", "p_sigma_mw",
                         "power budget (mW)", "budget-sensitivity")


def render_fig7(inputs: FigureInputs, out_dir: Path) -> List[str]:
    """Benchmark grid: secure reliability and deception rate versus the
    budget, one series per eavesdropper gain; infeasible cells noted."""
    table = inputs.tables["fig7"]
    z_values = np.unique(table.col("z_e_db"))
    fig, (ax_rs, ax_rd) = plt.subplots(1, 2, figsize=(10.0, 4.5),
                                       sharex=True, sharey=True)
    rs_series, rd_series = [], []
    for z in z_values:
        mask = table.col("z_e_db") == z
        order = np.argsort(table.col("p_sigma_mw")[mask])
        x = table.col("p_sigma_mw")[mask][order]
        label = f"z_e={z:g} dB"
        ax_rs.plot(x, table.col("r_s")[mask][order], marker=".", label=label)
        ax_rd.plot(x, table.col("r_d")[mask][order], marker=".", label=label)
        rs_series.append(_series(label, x, table.col("r_s")[mask][order]))
        rd_series.append(_series(label, x, table.col("r_d")[mask][order]))
    infeasible = table.col("infeasible")
    if infeasible.any():
        x_bad = table.col("p_sigma_mw")[infeasible]
        ax_rd.plot(x_bad, np.zeros_like(x_bad), linestyle="", marker="x",
                   color="0.4")
    ax_rs.set_title("secure reliability")
    ax_rd.set_title("deception rate")
    for ax in (ax_rs, ax_rd):
        ax.set_xlabel("power budget (mW)")
    ax_rs.set_ylabel("rate")
    panels = [
        {"name": "secure-reliability", "series": rs_series},
        {"name": "deception-rate", "series": rd_series},
    ]
    annotations = []
    if int(infeasible.sum()) > 0:
        annotations.append(f"infeasible-cells:{int(infeasible.sum())}")
    if _total_points(panels) == 0:
        _mark_infeasible(ax_rs)
        _mark_infeasible(ax_rd)
        annotations.append("infeasible")
    else:
        ax_rs.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _write(fig, out_dir, "fig7", {
        "figure": "fig7", "panels": panels, "annotations": annotations})


RENDERERS = {
    "fig2": render_fig2,
    "fig3": render_fig3,
    "fig4": render_fig4,
    "fig5": render_fig5,
    "fig6": render_fig6,
    "fig7": render_fig7,
}
