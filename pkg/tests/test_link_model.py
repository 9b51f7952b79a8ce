"""Link-level tests: SINR chain, error composition, utilities, rates,
and the constraint set.

Covers:
    - closed-form SINR anchors and the interference ordering
    - zero-key and zero-power conventions of the error chain
    - frozen high-precision link and utility reference values
    - composition identities between the sic/exact/approx modes
    - utility symmetry and boundary cases
    - security and deception rate identities and bounds
    - constraint flags: anchors, budget slack, the single-flag
      evaluator's agreement with the full checker, vectorized masks
"""

import math

import numpy as np
import pytest

from fblsec import (
    Scenario,
    Strategy,
    Thresholds,
    check_constraints,
    constraint_flag,
    expected_utility,
    feasibility_mask,
    link_report,
    metrics,
    sinr_key_direct,
    sinr_message,
    snr_key_after_sic,
    system_utility,
    u_fp,
    utility_report,
)
from fblsec.fbl_core import from_db
from fixtures import HIGH_PRECISION

FLAG_NAMES = (
    "message_power_nonneg",
    "key_power_nonneg",
    "within_budget",
    "keylen_in_range",
    "bob_message_reliable",
    "eve_message_reliable",
    "bob_key_reliable",
    "eve_key_secrecy",
    "nom_ordering",
)


def reference_scenario(**overrides):
    """Default two-receiver problem: 0 dB vs -10 dB gains, 64-symbol
    block, 16-bit message, 10 mW budget."""
    params = dict(z_b=1.0, z_e=0.1, sigma2=1.0, n=64, d_m=16, p_sigma=10.0)
    params.update(overrides)
    return Scenario(**params)


# ======================================================================
# Data validation
# ======================================================================

def test_thresholds_validation():
    Thresholds(0.3, 0.3, 0.3, 0.3)
    with pytest.raises(ValueError):
        Thresholds(eps_bm_th=0.0)
    with pytest.raises(ValueError):
        Thresholds(eps_ek_th=1.0)


def test_scenario_validation():
    reference_scenario(z_b=1.0, z_e=1.0)
    with pytest.raises(ValueError):
        reference_scenario(z_b=0.1, z_e=1.0)
    with pytest.raises(ValueError):
        reference_scenario(z_e=0.0)
    with pytest.raises(ValueError):
        reference_scenario(n=9)
    with pytest.raises(ValueError):
        reference_scenario(d_m=0)
    with pytest.raises(ValueError):
        reference_scenario(d_m=65)
    with pytest.raises(ValueError):
        reference_scenario(p_sigma=0.0)


def test_strategy_validation():
    Strategy(d_k=0.0, p_m=0.0, p_k=0.0)
    with pytest.raises(ValueError):
        Strategy(d_k=-1.0, p_m=1.0, p_k=1.0)
    with pytest.raises(ValueError):
        Strategy(d_k=1.0, p_m=float("inf"), p_k=1.0)


# ======================================================================
# SINR chain
# ======================================================================

def test_sinr_message_anchors():
    assert sinr_message(1.0, Strategy(30, 9.0, 1.0), 1.0) == 4.5
    assert sinr_message(1.0, Strategy(30, 0.0, 1.0), 1.0) == 0.0
    got = sinr_message(0.1, Strategy(30, 9.0, 1.0), 1.0)
    assert abs(got - 0.9 / 1.1) < 1e-15


def test_snr_key_after_sic_anchors():
    assert snr_key_after_sic(1.0, Strategy(30, 9.0, 1.0), 1.0) == 1.0
    assert snr_key_after_sic(1.0, Strategy(30, 9.0, 0.0), 1.0) == 0.0
    z = from_db(-5.0)
    got = snr_key_after_sic(z, Strategy(30, 8.0, 2.0), 1.0)
    assert abs(got - 2.0 * z) < 1e-15


def test_sinr_key_direct_anchors():
    assert sinr_key_direct(1.0, Strategy(30, 9.0, 1.0), 1.0) == 0.1
    assert sinr_key_direct(1.0, Strategy(30, 9.0, 0.0), 1.0) == 0.0
    got = sinr_key_direct(1.0, Strategy(30, 5.0, 4.0), 1.0)
    assert abs(got - 4.0 / 6.0) < 1e-15


def test_direct_key_sinr_below_unity_under_ordering():
    # with p_m > p_k the un-cancelled key packet is always below 0 dB
    rng = np.random.default_rng(41)
    for _ in range(200):
        p_k = float(rng.uniform(0.0, 5.0))
        p_m = p_k + float(rng.uniform(1e-6, 5.0))
        z = float(np.exp(rng.uniform(-3.0, 3.0)))
        s = Strategy(30, p_m, p_k)
        assert sinr_key_direct(z, s, 1.0) < 1.0


def test_sinr_rejects_bad_channel():
    s = Strategy(30, 8.0, 2.0)
    with pytest.raises(ValueError):
        sinr_message(0.0, s, 1.0)
    with pytest.raises(ValueError):
        snr_key_after_sic(1.0, s, 0.0)


# ======================================================================
# Per-receiver error chain
# ======================================================================

def test_link_report_fixture_strong_receiver():
    scen = reference_scenario()
    rep = link_report("bob", scen, Strategy(30.0, 8.0, 2.0))
    assert abs(rep.gamma_m - 8.0 / 3.0) < 1e-15
    assert rep.gamma_k == 2.0
    assert abs(rep.gamma_k_direct - 2.0 / 9.0) < 1e-15
    for field, key in (
        ("eps_m", "link_strong_eps_m"),
        ("eps_k_sic", "link_strong_eps_k_sic"),
        ("eps_k_direct", "link_strong_eps_k_direct"),
        ("eps_k_exact", "link_strong_eps_k_exact"),
        ("eps_k_approx", "link_strong_eps_k_approx"),
    ):
        got, ref = getattr(rep, field), HIGH_PRECISION[key]
        assert abs(got - ref) <= 1e-12 * ref, (field, got, ref)


def test_link_report_fixture_weak_receiver():
    scen = reference_scenario()
    rep = link_report("eve", scen, Strategy(30.0, 8.0, 2.0))
    for field, key in (
        ("eps_m", "link_weak_eps_m"),
        ("eps_k_sic", "link_weak_eps_k_sic"),
        ("eps_k_direct", "link_weak_eps_k_direct"),
        ("eps_k_exact", "link_weak_eps_k_exact"),
        ("eps_k_approx", "link_weak_eps_k_approx"),
    ):
        got, ref = getattr(rep, field), HIGH_PRECISION[key]
        assert abs(got - ref) <= 1e-12 * ref, (field, got, ref)


def test_zero_key_convention():
    scen = reference_scenario()
    for receiver in ("bob", "eve"):
        rep = link_report(receiver, scen, Strategy(0.0, 8.0, 2.0))
        assert rep.eps_k_sic == 0.0
        assert rep.eps_k_direct == 0.0
        assert rep.eps_k_exact == 0.0
        # the clipped-sum composite keeps its message term at zero length
        assert rep.eps_k_approx == rep.eps_m


def test_zero_key_power_convention():
    scen = reference_scenario()
    rep = link_report("bob", scen, Strategy(30.0, 10.0, 0.0))
    assert rep.eps_k_sic == 1.0
    assert rep.eps_k_direct == 1.0
    assert rep.eps_k_exact == 1.0
    assert rep.eps_k_approx == 1.0


def test_eps_k_mode_selector():
    scen = reference_scenario()
    rep = link_report("eve", scen, Strategy(30.0, 8.0, 2.0))
    assert rep.eps_k("sic") == rep.eps_k_sic
    assert rep.eps_k("exact") == rep.eps_k_exact
    assert rep.eps_k("approx") == rep.eps_k_approx
    with pytest.raises(ValueError):
        rep.eps_k("other")
    with pytest.raises(ValueError):
        link_report("eve", scen, Strategy(30.0, 8.0, 2.0), mode="other")
    with pytest.raises(ValueError):
        link_report("carol", scen, Strategy(30.0, 8.0, 2.0))


def test_composition_identities():
    scen = reference_scenario()
    rng = np.random.default_rng(43)
    for _ in range(100):
        p_m = float(rng.uniform(0.0, 10.0))
        p_k = float(rng.uniform(0.0, 10.0 - p_m))
        d_k = float(rng.uniform(0.5, 64.0))
        for receiver in ("bob", "eve"):
            rep = link_report(receiver, scen, Strategy(d_k, p_m, p_k))
            exact = (1.0 - rep.eps_m) * rep.eps_k_sic + rep.eps_m * rep.eps_k_direct
            approx = min(1.0, rep.eps_k_sic + rep.eps_m)
            assert abs(rep.eps_k_exact - exact) < 1e-15
            assert abs(rep.eps_k_approx - approx) < 1e-15


# ======================================================================
# Utilities
# ======================================================================

def test_expected_utility_vanishes_at_half_key_error():
    # z_b = 1, p_k = 1 puts the key SNR at 1, capacity 1 bit/symbol;
    # d_k = 64 sits exactly on the rate, so the key error is 0.5
    scen = reference_scenario()
    assert expected_utility("bob", scen, Strategy(64.0, 8.0, 1.0)) == 0.0


def test_expected_utility_vanishes_without_message_power():
    scen = reference_scenario()
    for receiver in ("bob", "eve"):
        assert expected_utility(receiver, scen, Strategy(30.0, 0.0, 2.0)) == 0.0


def test_system_utility_fixture():
    scen = reference_scenario()
    for mode, key in (("sic", "u_fp_30_8_sic"), ("exact", "u_fp_30_8_exact"),
                      ("approx", "u_fp_30_8_approx")):
        got = u_fp(scen, 30.0, 8.0, mode)
        ref = HIGH_PRECISION[key]
        assert abs(got - ref) <= 1e-12 * abs(ref), (mode, got, ref)


def test_u_fp_matches_system_utility():
    scen = reference_scenario()
    p = np.linspace(0.0, 10.0, 101)
    direct = system_utility(scen, 30.0, p, 10.0 - p)
    pinned = u_fp(scen, 30.0, p)
    assert np.all(direct == pinned)
    assert u_fp(scen, 30.0, 8.0) == system_utility(scen, 30.0, 8.0, 2.0)


def test_symmetric_receivers_cancel():
    scen = reference_scenario(z_b=0.5, z_e=0.5)
    p = np.linspace(0.0, 10.0, 51)
    for d_k in (0.0, 16.0, 40.0):
        assert np.all(u_fp(scen, d_k, p) == 0.0)


def test_utility_input_validation():
    scen = reference_scenario()
    with pytest.raises(ValueError):
        system_utility(scen, 30.0, -1.0, 2.0)
    with pytest.raises(ValueError):
        u_fp(scen, 30.0, 10.0 + 1e-9)
    with pytest.raises(ValueError):
        u_fp(scen, 30.0, -1e-9)


# ======================================================================
# Security and deception rates
# ======================================================================

def test_metrics_match_link_report_identities():
    scen = reference_scenario()
    rng = np.random.default_rng(47)
    for _ in range(50):
        p_m = float(rng.uniform(0.1, 10.0))
        p_k = float(rng.uniform(0.0, 10.0 - p_m))
        s = Strategy(float(rng.uniform(0.0, 64.0)), p_m, p_k)
        for mode in ("sic", "exact", "approx"):
            rep_b = link_report("bob", scen, s)
            rep_e = link_report("eve", scen, s)
            eps_b = 1.0 - (1.0 - rep_b.eps_m) * (1.0 - rep_b.eps_k(mode))
            eps_e = 1.0 - (1.0 - rep_e.eps_m) * (1.0 - rep_e.eps_k(mode))
            delta_b = (1.0 - rep_b.eps_m) * rep_b.eps_k(mode)
            delta_e = (1.0 - rep_e.eps_m) * rep_e.eps_k(mode)
            r_s, r_d = metrics(scen, s, mode)
            assert abs(r_s - (1.0 - eps_b) * eps_e) < 1e-15
            assert abs(r_d - (1.0 - delta_b) * delta_e) < 1e-15
            assert 0.0 <= r_s <= 1.0 and 0.0 <= r_d <= 1.0


def test_identical_receivers_bound_rates():
    # both rates have the form (1 - x) * x with equal receivers
    scen = reference_scenario(z_b=0.7, z_e=0.7)
    rng = np.random.default_rng(53)
    for _ in range(100):
        p_m = float(rng.uniform(0.0, 10.0))
        s = Strategy(float(rng.uniform(0.0, 64.0)), p_m,
                     float(rng.uniform(0.0, 10.0 - p_m)))
        r_s, r_d = metrics(scen, s)
        assert r_s <= 0.25 + 1e-15
        assert r_d <= 0.25 + 1e-15


def test_keyless_strategy_never_deceives():
    scen = reference_scenario()
    rng = np.random.default_rng(59)
    for _ in range(50):
        s = Strategy(0.0, float(rng.uniform(0.0, 10.0)), 0.0)
        r_s, r_d = metrics(scen, s)
        assert r_d == 0.0
        rep_b = link_report("bob", scen, s)
        rep_e = link_report("eve", scen, s)
        assert abs(r_s - (1.0 - rep_b.eps_m) * rep_e.eps_m) < 1e-15


def test_utility_report_bundles_consistently():
    scen = reference_scenario()
    s = Strategy(30.0, 8.0, 2.0)
    rep = utility_report(scen, s)
    assert rep.u_bob == expected_utility("bob", scen, s)
    assert rep.u_eve == expected_utility("eve", scen, s)
    assert rep.u_sigma == rep.u_bob - rep.u_eve
    r_s, r_d = metrics(scen, s)
    assert rep.r_s == r_s and rep.r_d == r_d
    assert rep.constraint_flags == check_constraints(scen, s)
    assert abs(rep.u_sigma - HIGH_PRECISION["u_fp_30_8_sic"]) < 1e-12


# ======================================================================
# Constraints
# ======================================================================

def test_feasible_sample_point():
    scen = reference_scenario()
    flags = check_constraints(scen, Strategy(30.0, 8.0, 2.0))
    for name in FLAG_NAMES:
        assert getattr(flags, name), name
    assert flags.feasible


def test_keyless_full_power_fails_secrecy_only():
    scen = reference_scenario()
    flags = check_constraints(scen, Strategy(0.0, 10.0, 0.0))
    assert flags.message_power_nonneg and flags.key_power_nonneg
    assert flags.within_budget and flags.keylen_in_range
    assert flags.bob_key_reliable
    assert not flags.eve_key_secrecy
    assert not flags.feasible


def test_budget_flag_and_slack():
    scen = reference_scenario()
    assert check_constraints(scen, Strategy(30.0, 8.0, 3.0)).within_budget is False
    # re-summing p_sigma - p_m may exceed the budget by float rounding;
    # a 1e-12-relative slack absorbs it
    assert check_constraints(scen, Strategy(30.0, 8.0, 2.0 + 1e-12)).within_budget
    assert not check_constraints(scen, Strategy(30.0, 8.0, 2.0 + 1e-9)).within_budget


def test_ordering_and_range_flags():
    scen = reference_scenario()
    assert not check_constraints(scen, Strategy(30.0, 4.0, 6.0)).nom_ordering
    assert check_constraints(scen, Strategy(30.0, 5.0, 5.0)).nom_ordering
    assert not check_constraints(scen, Strategy(65.0, 8.0, 2.0)).keylen_in_range
    assert not constraint_flag(scen, -0.5, 8.0, 2.0, "keylen_in_range")
    assert not constraint_flag(scen, 30.0, -1.0, 2.0, "message_power_nonneg")
    assert not constraint_flag(scen, 30.0, 8.0, -1.0, "key_power_nonneg")


def test_out_of_range_inputs_flag_without_raising():
    # error flags evaluate at clipped powers/key length so range
    # violations surface as flags, not exceptions
    scen = reference_scenario()
    assert constraint_flag(scen, 70.0, 8.0, 2.0, "bob_key_reliable") in (True, False)
    mask = feasibility_mask(scen, 70.0, np.array([8.0]), np.array([2.0]))
    assert mask[0] == np.False_


def test_single_flag_agrees_with_full_checker():
    rng = np.random.default_rng(61)
    scenarios = [
        reference_scenario(),
        reference_scenario(z_e=0.5, p_sigma=3.0, d_m=8),
        reference_scenario(z_b=2.0, z_e=0.05, n=128, d_m=24, p_sigma=6.0),
    ]
    for scen in scenarios:
        for _ in range(120):
            d_k = float(rng.uniform(-2.0, scen.n + 2.0))
            p_m = float(rng.uniform(0.0, scen.p_sigma * 1.2))
            p_k = float(rng.uniform(0.0, scen.p_sigma * 1.2))
            full = check_constraints(scen, Strategy(max(d_k, 0.0), p_m, p_k))
            for name in FLAG_NAMES:
                single = constraint_flag(scen, max(d_k, 0.0), p_m, p_k, name)
                assert single == getattr(full, name), (name, d_k, p_m, p_k)
    with pytest.raises(ValueError):
        constraint_flag(scenarios[0], 30.0, 8.0, 2.0, "no_such_flag")


def test_feasibility_mask_matches_scalar_checker():
    scen = reference_scenario()
    p_m = np.linspace(0.0, 10.0, 41)
    p_k = 10.0 - p_m
    for d_k in (0.0, 20.0, 30.0, 64.0):
        mask = feasibility_mask(scen, d_k, p_m, p_k)
        for j in range(p_m.size):
            flags = check_constraints(scen, Strategy(d_k, float(p_m[j]), float(p_k[j])))
            assert bool(mask[j]) == flags.feasible, (d_k, p_m[j])
