"""Independent brute-force validation of the design claims.

Everything here is built on the link model's public evaluation API with
its own grid machinery, deliberately sharing no code with the optimizer,
so that agreement between the two is evidence rather than tautology.

Validated claims, named by their report ids:
    T1  at any fixed key length, every conditional optimum of the
        unconstrained-budget power search lands on the full-budget
        boundary p_m + p_k = p_sigma (within one grid step).
    L1  under full power the message error of each receiver decreases
        strictly in message power and is convex where that receiver's
        message SINR is at least 1.
    T2  the full-power utility is concave along message power at
        interior feasible points.
    T3  the full-power utility is concave along the relaxed key length
        at interior feasible points.

Provides:
    SurfaceGrid, TheoremReport, PowerSweep, InsufficientPoints
    sweep_power_pair(scenario, d_k, resolution)
    full_surface(scenario, pm_points, dk_values)
    verify_theorem1(sweep)
    verify_concavity(surface, axis, tolerance)
    verify_lemma1(scenario, num_points, tolerance)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .fbl_core import BlockCode, fbl_error
from .link_model import Mode, Scenario, feasibility_mask, system_utility, u_fp


class InsufficientPoints(RuntimeError):
    """Fewer than three collinear feasible points to difference over."""


# ======================================================================
# Result containers
# ======================================================================

@dataclass(frozen=True)
class PowerSweep:
    """Conditional power optima per key-power column.

    For each key power on the grid, best_p_m is the feasible message
    power maximizing the system utility with the budget left free below
    p_sigma (nan where the column has no feasible point).
    """

    d_k: float
    resolution: float
    p_sigma: float
    p_k: np.ndarray
    best_p_m: np.ndarray
    utility: np.ndarray
    feasible: np.ndarray


@dataclass(frozen=True)
class SurfaceGrid:
    """Full-power utility and feasibility over a (p_m, d_k) grid.

    u and feasible are indexed [i_dk, i_pm]. argmax is the feasible
    maximum as (p_m, d_k, u), ties broken toward the smallest p_m and
    then the smallest d_k; None when nothing is feasible.
    """

    axis_pm: np.ndarray
    axis_dk: np.ndarray
    u: np.ndarray
    feasible: np.ndarray
    argmax: Optional[Tuple[float, float, float]]


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one brute-force claim check.

    Each violation is (coordinates, excess, tolerance) where excess is
    the amount by which the claimed bound was exceeded at those
    coordinates. notes records scope restrictions such as the SINR
    gate of the convexity clause.
    """

    theorem_id: str
    points_checked: int
    violations: Tuple[Tuple[tuple, float, float], ...]
    notes: str = ""

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0


# ======================================================================
# Grid evaluation
# ======================================================================

def _axis(extent: float, resolution: float) -> np.ndarray:
    steps = int(round(extent / resolution))
    return np.linspace(0.0, extent, steps + 1)


def sweep_power_pair(scenario: Scenario, d_k: float, resolution: float,
                     mode: Mode = "sic") -> PowerSweep:
    """Exhaustive conditional power search at fixed key length.

    For each key power p_k on a `resolution`-spaced grid over
    [0, p_sigma], searches the message power over [0, p_sigma - p_k]
    (budget free below the cap) and records the feasible utility
    maximizer; ties go to the smallest p_m.

    Args:
        scenario: problem constants.
        d_k: key length held fixed.
        resolution: grid step in mW, > 0.
        mode: key error composition of the utility.

    Returns:
        PowerSweep with one entry per key-power column.
    """
    if not resolution > 0:
        raise ValueError(f"resolution must be > 0, got {resolution}")
    p_k_axis = _axis(scenario.p_sigma, resolution)
    best_p_m = np.full(p_k_axis.size, np.nan)
    utility = np.full(p_k_axis.size, np.nan)
    feasible = np.zeros(p_k_axis.size, dtype=bool)
    for j, p_k in enumerate(p_k_axis):
        p_m_axis = _axis(scenario.p_sigma - p_k, resolution)
        mask = feasibility_mask(scenario, d_k, p_m_axis, np.full_like(p_m_axis, p_k))
        if not np.any(mask):
            continue
        u = system_utility(scenario, d_k, p_m_axis[mask], float(p_k), mode)
        idx = int(np.argmax(u))
        feasible[j] = True
        best_p_m[j] = p_m_axis[mask][idx]
        utility[j] = u[idx]
    return PowerSweep(
        d_k=float(d_k), resolution=float(resolution), p_sigma=scenario.p_sigma,
        p_k=p_k_axis, best_p_m=best_p_m, utility=utility, feasible=feasible,
    )


def full_surface(scenario: Scenario, pm_points: int = 201,
                 dk_values: Optional[Sequence[float]] = None,
                 mode: Mode = "sic") -> SurfaceGrid:
    """Full-power utility surface over message power and key length.

    Args:
        scenario: problem constants.
        pm_points: number of message-power samples over [0, p_sigma].
        dk_values: key lengths to evaluate; defaults to the integers
            0..n.
        mode: key error composition of the utility.

    Returns:
        SurfaceGrid with utility, feasibility and the feasible argmax.
    """
    if pm_points < 2:
        raise ValueError(f"pm_points must be >= 2, got {pm_points}")
    axis_pm = np.linspace(0.0, scenario.p_sigma, pm_points)
    if dk_values is None:
        axis_dk = np.arange(0.0, scenario.n + 1.0)
    else:
        axis_dk = np.asarray(sorted(float(d) for d in dk_values))
    p_k_axis = scenario.p_sigma - axis_pm
    u = np.empty((axis_dk.size, axis_pm.size))
    feas = np.empty((axis_dk.size, axis_pm.size), dtype=bool)
    for i, d_k in enumerate(axis_dk):
        u[i, :] = u_fp(scenario, float(d_k), axis_pm, mode)
        feas[i, :] = feasibility_mask(scenario, float(d_k), axis_pm, p_k_axis)
    argmax = None
    if np.any(feas):
        best_u = np.max(u[feas])
        ties = np.argwhere(feas & (u == best_u))
        order = sorted(ties.tolist(), key=lambda ij: (axis_pm[ij[1]], axis_dk[ij[0]]))
        i, j = order[0]
        argmax = (float(axis_pm[j]), float(axis_dk[i]), float(best_u))
    return SurfaceGrid(axis_pm=axis_pm, axis_dk=axis_dk, u=u, feasible=feas, argmax=argmax)


# ======================================================================
# Claim checks
# ======================================================================

def verify_theorem1(sweep: PowerSweep) -> TheoremReport:
    """T1: every feasible conditional optimum sits on the budget boundary.

    A column violates the claim when its optimal pair leaves more than
    one grid step of the budget unused.
    """
    tol = sweep.resolution + 1e-9
    violations = []
    checked = 0
    for j in range(sweep.p_k.size):
        if not sweep.feasible[j]:
            continue
        checked += 1
        gap = sweep.p_sigma - (sweep.best_p_m[j] + sweep.p_k[j])
        if gap > tol:
            violations.append(((float(sweep.p_k[j]), float(sweep.best_p_m[j])),
                               float(gap - tol), tol))
    return TheoremReport(
        theorem_id="T1", points_checked=checked, violations=tuple(violations),
        notes=f"d_k={sweep.d_k:g}, grid step {sweep.resolution:g} mW",
    )


def verify_concavity(surface: SurfaceGrid, axis: str,
                     tolerance: float = 1e-7) -> TheoremReport:
    """T2/T3: non-positive second differences of the utility surface.

    Checks raw second central differences along the chosen axis at every
    interior feasible point (both neighbors on the axis feasible too).
    Axis spacing must be uniform, which full_surface guarantees.

    Raises:
        InsufficientPoints: no axis line holds three adjacent feasible
            points.
    """
    if axis == "p_m":
        u = surface.u
        feas = surface.feasible
        coord_a, coord_b = surface.axis_dk, surface.axis_pm
        theorem_id = "T2"
    elif axis == "d_k":
        u = surface.u.T
        feas = surface.feasible.T
        coord_a, coord_b = surface.axis_pm, surface.axis_dk
        theorem_id = "T3"
    else:
        raise ValueError(f"axis must be 'p_m' or 'd_k', got {axis!r}")
    interior = feas[:, 1:-1] & feas[:, :-2] & feas[:, 2:]
    if not np.any(interior):
        raise InsufficientPoints(f"no three adjacent feasible points along {axis}")
    second = u[:, :-2] - 2.0 * u[:, 1:-1] + u[:, 2:]
    violations = []
    for a_idx, b_idx in np.argwhere(interior & (second > tolerance)).tolist():
        coords = ((float(coord_b[b_idx + 1]), float(coord_a[a_idx]))
                  if axis == "p_m" else
                  (float(coord_a[a_idx]), float(coord_b[b_idx + 1])))
        violations.append((coords, float(second[a_idx, b_idx] - tolerance), tolerance))
    return TheoremReport(
        theorem_id=theorem_id, points_checked=int(np.sum(interior)),
        violations=tuple(violations),
        notes=f"interior feasible points along {axis}",
    )


def verify_lemma1(scenario: Scenario, num_points: int = 10001,
                  tolerance: float = 1e-7) -> TheoremReport:
    """L1: message error falls strictly and is convex in message power.

    Works on the full-power slice. A power sample belongs to the checked
    range when some integer key length makes it feasible; monotonicity
    is required between adjacent checked samples, convexity only on
    sample triples where the receiver's message SINR is at least 1
    throughout (below that the claim is not made).
    """
    p = np.linspace(0.0, scenario.p_sigma, num_points)
    p_k = scenario.p_sigma - p
    mask = np.zeros(num_points, dtype=bool)
    for d_k in range(scenario.n + 1):
        mask |= feasibility_mask(scenario, float(d_k), p, p_k)
        if np.all(mask):
            break
    code_m = BlockCode(scenario.n, scenario.d_m)
    violations = []
    checked = 0
    gated = {}
    for name, z in (("bob", scenario.z_b), ("eve", scenario.z_e)):
        gamma = z * p / (z * p_k + scenario.sigma2)
        eps = fbl_error(gamma, code_m)
        pair = mask[:-1] & mask[1:]
        checked += int(np.sum(pair))
        diff = eps[1:] - eps[:-1]
        for i in np.nonzero(pair & (diff >= 0.0))[0].tolist():
            violations.append(((float(p[i + 1]), name), float(diff[i]), 0.0))
        triple = mask[:-2] & mask[1:-1] & mask[2:]
        gate = (gamma[:-2] >= 1.0) & (gamma[1:-1] >= 1.0) & (gamma[2:] >= 1.0)
        second = eps[:-2] - 2.0 * eps[1:-1] + eps[2:]
        scope = triple & gate
        gated[name] = int(np.sum(scope))
        checked += gated[name]
        for i in np.nonzero(scope & (second < -tolerance))[0].tolist():
            violations.append(((float(p[i + 1]), name),
                               float(-tolerance - second[i]), tolerance))
    return TheoremReport(
        theorem_id="L1", points_checked=checked, violations=tuple(violations),
        notes=(
            "convexity gated to message SINR >= 1; gated triples "
            f"bob={gated['bob']}, eve={gated['eve']}"
        ),
    )
