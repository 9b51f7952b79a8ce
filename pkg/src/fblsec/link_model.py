"""Two-packet superposed link: SINR chains, error chains, utilities.

A transmitter superposes a ciphered message packet (d_m bits at power
p_m) and a key packet (d_k bits at power p_k) on one block of n symbols.
Each receiver decodes the message first, treating the key as
interference, cancels it, then decodes the key at its post-cancellation
SNR. A receiver that obtains the message but not the key deciphers with
a wrong key and accepts a false payload, which is the deception effect
the system utility rewards against the eavesdropper. This module scores
both receivers, the system utility (also restricted to full power), the
security and deception rates, and the constraint set of the joint power
and key-length design problem.

Provides:
    Thresholds, Scenario, Strategy   : immutable problem data
    LinkReport, UtilityReport, ConstraintFlags
    sinr_message / snr_key_after_sic / sinr_key_direct
    link_report(receiver, scenario, s)
    expected_utility / system_utility / u_fp
    metrics / utility_report
    check_constraints(scenario, s) and feasibility_mask(...)

Error-composition modes for the key packet:
    "sic"    pure post-cancellation key error (the mode the design
             theorems reason about; package-wide default)
    "exact"  mixture over whether the message decode succeeded
    "approx" first-order upper composition min(1, key + message error)
All three composites are always carried in every LinkReport; `mode`
only selects which one feeds a utility or metric. Constraint checking
always uses the pure post-cancellation terms, so feasibility does not
depend on `mode`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .fbl_core import BlockCode, fbl_error

Receiver = Literal["bob", "eve"]
Mode = Literal["sic", "exact", "approx"]

_MODES = ("sic", "exact", "approx")

# Slack for the power-budget comparison: p_k is routinely constructed as
# p_sigma - p_m, and the re-summed budget may exceed p_sigma by rounding.
_BUDGET_RTOL = 1e-12


# ======================================================================
# Problem data
# ======================================================================

@dataclass(frozen=True)
class Thresholds:
    """Error-probability thresholds of the reliability/secrecy constraints.

    The message constraints and the legitimate key constraint are upper
    bounds; the eavesdropper key constraint is a lower bound (her key
    decoding must stay unreliable).
    """

    eps_bm_th: float = 0.5
    eps_em_th: float = 0.5
    eps_bk_th: float = 0.5
    eps_ek_th: float = 0.5

    def __post_init__(self) -> None:
        for name in ("eps_bm_th", "eps_em_th", "eps_bk_th", "eps_ek_th"):
            v = getattr(self, name)
            if not np.isfinite(v) or not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


@dataclass(frozen=True)
class Scenario:
    """Channel and problem constants for one design problem.

    Fields:
        z_b: linear channel gain of the legitimate receiver (> 0).
        z_e: linear channel gain of the eavesdropper; z_b >= z_e > 0 is
            the feasibility precondition for keeping any secrecy edge.
        sigma2: AWGN power in mW (> 0).
        n: blocklength in symbols (integer >= 10).
        d_m: message payload in bits (integer, 1 <= d_m <= n).
        p_sigma: total transmit power budget in mW (finite, > 0).
        thresholds: constraint thresholds; the key-side design results
            assume eps_bk_th <= 0.5 <= eps_ek_th, which the defaults use.
    """

    z_b: float
    z_e: float
    sigma2: float
    n: int
    d_m: int
    p_sigma: float
    thresholds: Thresholds = Thresholds()

    def __post_init__(self) -> None:
        if not (np.isfinite(self.z_b) and np.isfinite(self.z_e)) or not self.z_b >= self.z_e > 0:
            raise ValueError(f"channel gains must satisfy z_b >= z_e > 0, got {self.z_b}, {self.z_e}")
        if not np.isfinite(self.sigma2) or self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")
        if int(self.n) != self.n or self.n < 10:
            raise ValueError(f"n must be an integer >= 10, got {self.n}")
        if int(self.d_m) != self.d_m or not 1 <= self.d_m <= self.n:
            raise ValueError(f"d_m must be an integer in [1, n], got {self.d_m}")
        if not np.isfinite(self.p_sigma) or self.p_sigma <= 0:
            raise ValueError(f"p_sigma must be finite and > 0, got {self.p_sigma}")


@dataclass(frozen=True)
class Strategy:
    """One transmit design point: key length d_k and the two powers.

    Only non-negativity and finiteness are enforced here. The power
    ordering p_m >= p_k, the budget, and the key-length range are
    constraint-time checks because sweeps must be free to evaluate
    violating points and merely flag them.
    """

    d_k: float
    p_m: float
    p_k: float

    def __post_init__(self) -> None:
        for name in ("d_k", "p_m", "p_k"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


# ======================================================================
# Reports
# ======================================================================

@dataclass(frozen=True)
class LinkReport:
    """Per-receiver SINRs and decoding error probabilities.

    eps_k_sic is the pure post-cancellation key error, eps_k_direct the
    key error when decoded under the message's interference, and
    eps_k_exact / eps_k_approx the two composites built from them. All
    are always present regardless of the requested mode.
    """

    receiver: Receiver
    gamma_m: float
    gamma_k: float
    gamma_k_direct: float
    eps_m: float
    eps_k_sic: float
    eps_k_direct: float
    eps_k_exact: float
    eps_k_approx: float

    def eps_k(self, mode: Mode = "sic") -> float:
        """Key error probability under the given composition mode."""
        if mode == "sic":
            return self.eps_k_sic
        if mode == "exact":
            return self.eps_k_exact
        if mode == "approx":
            return self.eps_k_approx
        raise ValueError(f"unknown mode {mode!r}, expected one of {_MODES}")


@dataclass(frozen=True)
class ConstraintFlags:
    """Pass/fail flags for the design problem's constraint set.

    The four error constraints are evaluated on the pure post-
    cancellation terms, so they are independent of the utility mode.
    nom_ordering is the superposition-order requirement p_m >= p_k,
    admitted with equality as the closure of the strict ordering.
    """

    message_power_nonneg: bool
    key_power_nonneg: bool
    within_budget: bool
    keylen_in_range: bool
    bob_message_reliable: bool
    eve_message_reliable: bool
    bob_key_reliable: bool
    eve_key_secrecy: bool
    nom_ordering: bool

    @property
    def feasible(self) -> bool:
        """True when every flag, including the power ordering, passes."""
        return (
            self.message_power_nonneg
            and self.key_power_nonneg
            and self.within_budget
            and self.keylen_in_range
            and self.bob_message_reliable
            and self.eve_message_reliable
            and self.bob_key_reliable
            and self.eve_key_secrecy
            and self.nom_ordering
        )


@dataclass(frozen=True)
class UtilityReport:
    """System-level scoring of one strategy."""

    u_bob: float
    u_eve: float
    u_sigma: float
    r_s: float
    r_d: float
    constraint_flags: ConstraintFlags


# ======================================================================
# SINR chain
# ======================================================================

def sinr_message(z: float, s: Strategy, sigma2: float) -> float:
    """Message SINR: the key packet acts as unresolved interference."""
    _require_channel(z, sigma2)
    return float(z * s.p_m / (z * s.p_k + sigma2))


def snr_key_after_sic(z: float, s: Strategy, sigma2: float) -> float:
    """Key SNR after the decoded message has been cancelled."""
    _require_channel(z, sigma2)
    return float(z * s.p_k / sigma2)


def sinr_key_direct(z: float, s: Strategy, sigma2: float) -> float:
    """Key SINR without cancellation, under the message's interference.

    Strictly below 1 (0 dB) whenever p_m > p_k, which is why direct key
    decoding is never the design operating point.
    """
    _require_channel(z, sigma2)
    return float(z * s.p_k / (z * s.p_m + sigma2))


def _require_channel(z: float, sigma2: float) -> None:
    if z <= 0 or sigma2 <= 0:
        raise ValueError(f"need z > 0 and sigma2 > 0, got z={z}, sigma2={sigma2}")


# ======================================================================
# Vectorized error core
# ======================================================================

def _gamma_message(scenario: Scenario, z: float, p_m, p_k):
    return z * p_m / (z * p_k + scenario.sigma2)


def _gamma_key_sic(scenario: Scenario, z: float, p_k):
    return z * p_k / scenario.sigma2


def _gamma_key_direct(scenario: Scenario, z: float, p_m, p_k):
    return z * p_k / (z * p_m + scenario.sigma2)


def _packet_errors(scenario: Scenario, z: float, d_k: float, p_m, p_k):
    """Message and key error terms for one receiver gain z.

    p_m and p_k may be scalars or broadcastable ndarrays; d_k must be a
    scalar. Returns (eps_m, eps_k_sic, eps_k_direct) with the zero-key
    convention applied: an absent key packet (d_k = 0) never fails.
    """
    p_m = np.asarray(p_m, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    eps_m = fbl_error(_gamma_message(scenario, z, p_m, p_k),
                      BlockCode(scenario.n, scenario.d_m))
    if d_k == 0:
        zero = np.zeros(np.broadcast(p_m, p_k).shape)
        eps_m_b = np.broadcast_to(np.asarray(eps_m), zero.shape).copy()
        return eps_m_b, zero, zero.copy()
    code_k = BlockCode(scenario.n, d_k)
    eps_k_sic = fbl_error(_gamma_key_sic(scenario, z, p_k), code_k)
    eps_k_direct = fbl_error(_gamma_key_direct(scenario, z, p_m, p_k), code_k)
    return np.asarray(eps_m), np.asarray(eps_k_sic), np.asarray(eps_k_direct)


def _compose_key_error(eps_m, eps_k_sic, eps_k_direct, mode: Mode):
    """Select the key error composite that feeds a utility."""
    if mode == "sic":
        return eps_k_sic
    if mode == "exact":
        return (1.0 - eps_m) * eps_k_sic + eps_m * eps_k_direct
    if mode == "approx":
        return np.minimum(1.0, eps_k_sic + eps_m)
    raise ValueError(f"unknown mode {mode!r}, expected one of {_MODES}")


def _receiver_gain(scenario: Scenario, receiver: Receiver) -> float:
    if receiver == "bob":
        return scenario.z_b
    if receiver == "eve":
        return scenario.z_e
    raise ValueError(f"unknown receiver {receiver!r}, expected 'bob' or 'eve'")


# ======================================================================
# Reports and utilities
# ======================================================================

def link_report(receiver: Receiver, scenario: Scenario, s: Strategy,
                mode: Mode = "sic") -> LinkReport:
    """Full per-receiver error chain for one strategy.

    `mode` is accepted for signature uniformity with the utility
    operations; every composite is always computed and included.

    Args:
        receiver: "bob" (legitimate) or "eve" (eavesdropper).
        scenario: channel and problem constants.
        s: strategy to evaluate; powers must be >= 0.
        mode: carried along, does not change the report contents.

    Returns:
        LinkReport with SINRs and all error terms.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {_MODES}")
    z = _receiver_gain(scenario, receiver)
    eps_m, eps_k_sic, eps_k_direct = _packet_errors(scenario, z, s.d_k, s.p_m, s.p_k)
    eps_k_exact = _compose_key_error(eps_m, eps_k_sic, eps_k_direct, "exact")
    eps_k_approx = _compose_key_error(eps_m, eps_k_sic, eps_k_direct, "approx")
    return LinkReport(
        receiver=receiver,
        gamma_m=sinr_message(z, s, scenario.sigma2),
        gamma_k=snr_key_after_sic(z, s, scenario.sigma2),
        gamma_k_direct=sinr_key_direct(z, s, scenario.sigma2),
        eps_m=float(eps_m),
        eps_k_sic=float(eps_k_sic),
        eps_k_direct=float(eps_k_direct),
        eps_k_exact=float(eps_k_exact),
        eps_k_approx=float(eps_k_approx),
    )


def expected_utility(receiver: Receiver, scenario: Scenario, s: Strategy,
                     mode: Mode = "sic") -> float:
    """Expected per-receiver utility (1 - eps_m) * (1 - 2 * eps_k).

    A receiver gains 1 for a deciphered payload, loses 1 when deceived
    by a wrong key, and gains nothing without the message; the key error
    composite is selected by `mode`.
    """
    rep = link_report(receiver, scenario, s, mode)
    return float((1.0 - rep.eps_m) * (1.0 - 2.0 * rep.eps_k(mode)))


def system_utility(scenario: Scenario, d_k: float, p_m, p_k, mode: Mode = "sic"):
    """System utility u_bob - u_eve at explicit powers, array-friendly.

    Args:
        scenario: problem constants.
        d_k: key length in bits, scalar.
        p_m, p_k: powers in mW, scalars or broadcastable ndarrays.
        mode: key error composition fed into both utilities.

    Returns:
        Utility difference, float for scalar inputs, else ndarray.
    """
    p_m_arr = np.asarray(p_m, dtype=float)
    p_k_arr = np.asarray(p_k, dtype=float)
    if np.any(p_m_arr < 0) or np.any(p_k_arr < 0):
        raise ValueError("powers must be >= 0")
    u = None
    for z, sign in ((scenario.z_b, 1.0), (scenario.z_e, -1.0)):
        eps_m, eps_k_sic, eps_k_direct = _packet_errors(scenario, z, d_k, p_m_arr, p_k_arr)
        eps_k = _compose_key_error(eps_m, eps_k_sic, eps_k_direct, mode)
        term = sign * (1.0 - eps_m) * (1.0 - 2.0 * eps_k)
        u = term if u is None else u + term
    scalar = p_m_arr.ndim == 0 and p_k_arr.ndim == 0
    return float(u) if scalar else u


def u_fp(scenario: Scenario, d_k: float, p_m, mode: Mode = "sic"):
    """System utility under full power: p_k is pinned to p_sigma - p_m.

    Args:
        scenario: problem constants.
        d_k: key length in bits, scalar, 0 <= d_k <= n.
        p_m: message power in mW, scalar or ndarray, within [0, p_sigma].
        mode: key error composition.

    Returns:
        Utility difference, float for scalar p_m, else ndarray.
    """
    p_m_arr = np.asarray(p_m, dtype=float)
    if np.any(p_m_arr < 0) or np.any(p_m_arr > scenario.p_sigma):
        raise ValueError("u_fp requires 0 <= p_m <= p_sigma")
    out = system_utility(scenario, d_k, p_m_arr, scenario.p_sigma - p_m_arr, mode)
    return float(out) if p_m_arr.ndim == 0 else out


def metrics(scenario: Scenario, s: Strategy, mode: Mode = "sic") -> tuple:
    """Security and deception rates (r_s, r_d) of one strategy.

    r_s is the probability that the legitimate receiver deciphers the
    payload while the eavesdropper does not. r_d is the probability that
    the eavesdropper is deceived (message decoded, key missed) while the
    legitimate receiver is not.
    """
    rep_b = link_report("bob", scenario, s, mode)
    rep_e = link_report("eve", scenario, s, mode)
    eps_b = 1.0 - (1.0 - rep_b.eps_m) * (1.0 - rep_b.eps_k(mode))
    eps_e = 1.0 - (1.0 - rep_e.eps_m) * (1.0 - rep_e.eps_k(mode))
    delta_b = (1.0 - rep_b.eps_m) * rep_b.eps_k(mode)
    delta_e = (1.0 - rep_e.eps_m) * rep_e.eps_k(mode)
    r_s = (1.0 - eps_b) * eps_e
    r_d = (1.0 - delta_b) * delta_e
    return float(r_s), float(r_d)


def utility_report(scenario: Scenario, s: Strategy, mode: Mode = "sic") -> UtilityReport:
    """Bundle utilities, rates and constraint flags for one strategy."""
    u_bob = expected_utility("bob", scenario, s, mode)
    u_eve = expected_utility("eve", scenario, s, mode)
    r_s, r_d = metrics(scenario, s, mode)
    return UtilityReport(
        u_bob=u_bob,
        u_eve=u_eve,
        u_sigma=u_bob - u_eve,
        r_s=r_s,
        r_d=r_d,
        constraint_flags=check_constraints(scenario, s),
    )


# ======================================================================
# Constraints
# ======================================================================

def _flag_arrays(scenario: Scenario, d_k: float, p_m, p_k):
    """All constraint flags, vectorized over the power arrays.

    Error terms are evaluated at powers clipped to zero and a key length
    clipped into [0, n] so that out-of-range inputs are reported by their
    range flags instead of raising.
    """
    p_m = np.asarray(p_m, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    th = scenario.thresholds
    budget_slack = _BUDGET_RTOL * max(1.0, scenario.p_sigma)
    d_k_eval = min(max(float(d_k), 0.0), float(scenario.n))
    p_m_eval = np.maximum(p_m, 0.0)
    p_k_eval = np.maximum(p_k, 0.0)
    eps_bm, eps_bk, _ = _packet_errors(scenario, scenario.z_b, d_k_eval, p_m_eval, p_k_eval)
    eps_em, eps_ek, _ = _packet_errors(scenario, scenario.z_e, d_k_eval, p_m_eval, p_k_eval)
    return {
        "message_power_nonneg": p_m >= 0.0,
        "key_power_nonneg": p_k >= 0.0,
        "within_budget": p_m + p_k <= scenario.p_sigma + budget_slack,
        "keylen_in_range": np.full_like(p_m, 0.0 <= d_k <= scenario.n, dtype=bool),
        "bob_message_reliable": eps_bm <= th.eps_bm_th,
        "eve_message_reliable": eps_em <= th.eps_em_th,
        "bob_key_reliable": eps_bk <= th.eps_bk_th,
        "eve_key_secrecy": eps_ek >= th.eps_ek_th,
        "nom_ordering": p_m >= p_k,
    }


def check_constraints(scenario: Scenario, s: Strategy) -> ConstraintFlags:
    """Evaluate every design constraint for one strategy.

    Reports and never raises: power signs, budget, key-length range, the
    four error-probability thresholds (on pure post-cancellation terms),
    and the superposition power ordering p_m >= p_k.
    """
    flags = _flag_arrays(scenario, s.d_k, s.p_m, s.p_k)
    return ConstraintFlags(**{name: bool(val) for name, val in flags.items()})


def constraint_flag(scenario: Scenario, d_k: float, p_m: float, p_k: float,
                    name: str) -> bool:
    """One constraint flag at one point, skipping the other eight.

    Agrees bit-for-bit with check_constraints on every flag; boundary
    bisections probe single flags thousands of times, so the five error
    terms the flag does not need are never computed.
    """
    if name == "message_power_nonneg":
        return p_m >= 0.0
    if name == "key_power_nonneg":
        return p_k >= 0.0
    if name == "within_budget":
        budget_slack = _BUDGET_RTOL * max(1.0, scenario.p_sigma)
        return p_m + p_k <= scenario.p_sigma + budget_slack
    if name == "keylen_in_range":
        return 0.0 <= d_k <= scenario.n
    if name == "nom_ordering":
        return p_m >= p_k

    z = scenario.z_b if name.startswith("bob") else scenario.z_e
    th = scenario.thresholds
    d_k_eval = min(max(float(d_k), 0.0), float(scenario.n))
    p_m_eval = max(float(p_m), 0.0)
    p_k_eval = max(float(p_k), 0.0)
    if name == "bob_message_reliable" or name == "eve_message_reliable":
        gamma = _gamma_message(scenario, z, p_m_eval, p_k_eval)
        eps = fbl_error(gamma, BlockCode(scenario.n, scenario.d_m))
        limit = th.eps_bm_th if name == "bob_message_reliable" else th.eps_em_th
        return eps <= limit
    if name == "bob_key_reliable":
        if d_k_eval == 0:
            return 0.0 <= th.eps_bk_th
        eps = fbl_error(_gamma_key_sic(scenario, z, p_k_eval),
                        BlockCode(scenario.n, d_k_eval))
        return eps <= th.eps_bk_th
    if name == "eve_key_secrecy":
        if d_k_eval == 0:
            return 0.0 >= th.eps_ek_th
        eps = fbl_error(_gamma_key_sic(scenario, z, p_k_eval),
                        BlockCode(scenario.n, d_k_eval))
        return eps >= th.eps_ek_th
    raise ValueError(f"unknown constraint flag {name!r}")


def feasibility_mask(scenario: Scenario, d_k: float, p_m, p_k):
    """Vectorized all-constraints-pass mask over power arrays.

    Same predicate as ConstraintFlags.feasible, evaluated elementwise;
    used by grid sweeps so scalar checks and grid masks cannot diverge.
    """
    flags = _flag_arrays(scenario, d_k, p_m, p_k)
    out = None
    for val in flags.values():
        arr = np.asarray(val, dtype=bool)
        out = arr if out is None else out & arr
    return out
