"""CSV artifact schemas: discovery, validation and typed loading.

The experiment CLI documents one stable schema per artifact. Everything
here checks those schemas before any drawing happens, so a rendering
failure can always be traced to a named file, column or row.

Column type codes: f = float (nan allowed), b = boolean true/false,
s = free string.

Provides:
    SchemaError, Table, FigureInputs
    FIGURE_IDS
    load_table(path, header, types)
    gather(experiment_id, in_dir) -> FigureInputs
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np


class SchemaError(ValueError):
    """An input CSV is missing or does not match its documented schema."""


# ======================================================================
# Documented artifact schemas
# ======================================================================

SWEEP_HEADER = ("p_k", "best_p_m", "utility", "feasible")
SWEEP_TYPES = "fffb"

SURFACE_HEADER = ("p_m", "d_k", "u_fp", "feasible")
SURFACE_TYPES = "fffb"

SURFACE_MODES_HEADER = ("p_m", "d_k", "u_fp", "feasible",
                        "u_fp_exact", "u_fp_approx")
SURFACE_MODES_TYPES = "fffbff"

TRACE_HEADER = ("t", "d_k", "p_m", "u_fp")
TRACE_TYPES = "ffff"

SENSITIVITY_HEADER = ("z_e_db", "u_fp", "r_s", "r_d", "baseline_r_s",
                      "d_k", "p_m", "status", "baseline_p_m")
SENSITIVITY_TYPES = "fffffffsf"

BUDGET_HEADER = ("p_sigma_mw", "u_fp", "r_s", "r_d", "baseline_r_s",
                 "d_k", "p_m", "status", "baseline_p_m")
BUDGET_TYPES = "fffffffsf"

BENCHMARK_HEADER = ("z_e_db", "p_sigma_mw", "u_fp", "r_s", "r_d",
                    "baseline_r_s", "infeasible", "d_k", "p_m", "status")
BENCHMARK_TYPES = "ffffffbffs"

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")


@dataclass(frozen=True)
class Table:
    """One validated CSV artifact.

    columns maps each header name to a numpy array: float64 for 'f'
    columns (missing values as nan), bool for 'b', object (str) for
    's'. All columns share one length.
    """

    path: Path
    header: Tuple[str, ...]
    columns: Dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.columns[self.header[0]])

    def col(self, name: str) -> np.ndarray:
        return self.columns[name]


@dataclass(frozen=True)
class FigureInputs:
    """Validated inputs of one figure.

    tables maps logical keys to loaded tables: single-file figures use
    the experiment id itself; per-series families use labeled keys such
    as 'dk30' (fig2) or 'dm16' (fig4 trace/surface pairs).
    """

    experiment_id: str
    tables: Dict[str, Table]


# ======================================================================
# Loading
# ======================================================================

def _parse_cell(raw: str, code: str, path: Path, row: int, name: str):
    if code == "s":
        return raw
    if code == "b":
        if raw == "true":
            return True
        if raw == "false":
            return False
        raise SchemaError(f"{path.name} row {row}: column {name!r} must be "
                          f"true or false, got {raw!r}")
    try:
        return float(raw)
    except ValueError as exc:
        raise SchemaError(f"{path.name} row {row}: column {name!r} must be "
                          f"numeric, got {raw!r}") from exc


def load_table(path: Path, header: Sequence[str], types: str) -> Table:
    """Load one CSV and check it against its documented schema.

    Args:
        path: CSV file location.
        header: expected header row, order-sensitive.
        types: per-column type codes, one of 'f', 'b', 's'.

    Returns:
        Table with typed numpy columns.

    Raises:
        SchemaError: missing file, wrong header, ragged row, bad cell.
    """
    if not path.is_file():
        raise SchemaError(f"required artifact {path} is missing")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise SchemaError(f"{path.name} is empty; expected header "
                              f"{','.join(header)}") from None
        if tuple(got) != tuple(header):
            raise SchemaError(f"{path.name} header mismatch: expected "
                              f"{','.join(header)}, got {','.join(got)}")
        cells: List[list] = [[] for _ in header]
        for row_idx, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise SchemaError(f"{path.name} row {row_idx}: expected "
                                  f"{len(header)} cells, got {len(row)}")
            for j, raw in enumerate(row):
                cells[j].append(_parse_cell(raw, types[j], path, row_idx,
                                            header[j]))
    columns = {}
    for name, code, values in zip(header, types, cells):
        if code == "f":
            columns[name] = np.array(values, dtype=float)
        elif code == "b":
            columns[name] = np.array(values, dtype=bool)
        else:
            columns[name] = np.array(values, dtype=object)
    return Table(path=path, header=tuple(header), columns=columns)


# ======================================================================
# Discovery
# ======================================================================

def _family(in_dir: Path, pattern: str, prefix: str, header, types,
            key_prefix: str) -> Dict[str, Table]:
    found = sorted(in_dir.glob(pattern))
    if not found:
        raise SchemaError(f"no {pattern} artifacts found in {in_dir}")
    tables = {}
    for path in found:
        label = key_prefix + path.stem[len(prefix):]
        tables[label] = load_table(path, header, types)
    return tables


def gather(experiment_id: str, in_dir: Path) -> FigureInputs:
    """Locate and validate every artifact one figure needs.

    Args:
        experiment_id: one of FIGURE_IDS.
        in_dir: directory the experiment CLI wrote into.

    Returns:
        FigureInputs with all referenced tables loaded.

    Raises:
        SchemaError: unknown figure, missing directory or artifact, or
            any schema mismatch.
    """
    if experiment_id not in FIGURE_IDS:
        raise SchemaError(f"unknown figure {experiment_id!r}; expected one "
                          f"of {', '.join(FIGURE_IDS)}")
    if not in_dir.is_dir():
        raise SchemaError(f"input directory {in_dir} does not exist")
    if experiment_id == "fig2":
        tables = _family(in_dir, "fig2_dk*.csv", "fig2_", SWEEP_HEADER,
                         SWEEP_TYPES, "")
    elif experiment_id == "fig3":
        tables = {"fig3": load_table(in_dir / "fig3_surface.csv",
                                     SURFACE_MODES_HEADER, SURFACE_MODES_TYPES)}
    elif experiment_id == "fig4":
        traces = _family(in_dir, "fig4_trace_dm*.csv", "fig4_trace_",
                         TRACE_HEADER, TRACE_TYPES, "trace_")
        tables = dict(traces)
        for key in traces:
            suffix = key[len("trace_"):]
            surface_path = in_dir / f"fig4_surface_{suffix}.csv"
            tables[f"surface_{suffix}"] = load_table(
                surface_path, SURFACE_HEADER, SURFACE_TYPES)
    elif experiment_id == "fig5":
        tables = {"fig5": load_table(in_dir / "fig5_sensitivity.csv",
                                     SENSITIVITY_HEADER, SENSITIVITY_TYPES)}
    elif experiment_id == "fig6":
        tables = {"fig6": load_table(in_dir / "fig6_budget.csv",
                                     BUDGET_HEADER, BUDGET_TYPES)}
    else:
        tables = {"fig7": load_table(in_dir / "fig7_benchmark.csv",
                                     BENCHMARK_HEADER, BENCHMARK_TYPES)}
    return FigureInputs(experiment_id=experiment_id, tables=tables)
