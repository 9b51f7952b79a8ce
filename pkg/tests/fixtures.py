"""Frozen high-precision reference values.

Generated by tools/gen_fixtures.py (50-digit interval-free
recomputation, rounded once to binary64). Do not edit by hand.
"""

HIGH_PRECISION = {
    "eps_64_16_at_4_5": 6.218159071868169e-36,
    "eps_64_30_at_0_25": 0.9125970859880388,
    "eps_64_60_at_0_1": 1.0,
    "link_strong_eps_k_approx": 2.6006243377784587e-11,
    "link_strong_eps_k_direct": 0.9580691827796983,
    "link_strong_eps_k_exact": 2.600624337762195e-11,
    "link_strong_eps_k_sic": 2.6006243373905863e-11,
    "link_strong_eps_m": 3.87872384112337e-21,
    "link_weak_eps_k_approx": 0.9808434459895603,
    "link_weak_eps_k_direct": 0.9999720520482167,
    "link_weak_eps_k_exact": 0.9804820737691777,
    "link_weak_eps_k_sic": 0.980474887932248,
    "link_weak_eps_m": 0.000368558057312257,
    "q_at_0_1": 0.460172162722971,
    "q_at_1": 0.15865525393145705,
    "q_at_minus_2_5": 0.9937903346742238,
    "u_fp_30_8_approx": 1.9613324544744577,
    "u_fp_30_8_exact": 1.9606099764069795,
    "u_fp_30_8_sic": 1.9605956100299164,
}
