"""Regenerate tests/fixtures.py from a 50-digit independent oracle.

Recomputes every frozen reference value with mpmath at 50 decimal
digits, then rounds once to binary64. The test suite compares the
package's double-precision kernels against these values; regeneration is
only needed when a fixture point is added.

Run from the repository root:

    python3 tools/gen_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

from mpmath import erfc, log, mp, mpf, sqrt

mp.dps = 50

LN2 = log(2)


# ======================================================================
# Oracle kernels
# ======================================================================

def q_function(x):
    return erfc(x / sqrt(2)) / 2


def capacity(gamma):
    return log(1 + gamma) / LN2


def dispersion(gamma):
    return 1 - 1 / (1 + gamma) ** 2


def omega(gamma, n, d):
    return sqrt(mpf(n) / dispersion(gamma)) * (capacity(gamma) - mpf(d) / n)


def fbl_error(gamma, n, d):
    if gamma == 0:
        return mpf(1) if d > 0 else mpf(0)
    return q_function(omega(gamma, n, d) * LN2)


def link_errors(z, sigma2, n, d_m, d_k, p_m, p_k):
    """Message and key error chain for one receiver gain."""
    gamma_m = z * p_m / (z * p_k + sigma2)
    gamma_k = z * p_k / sigma2
    gamma_k_direct = z * p_k / (z * p_m + sigma2)
    eps_m = fbl_error(gamma_m, n, d_m)
    eps_k_sic = fbl_error(gamma_k, n, d_k)
    eps_k_direct = fbl_error(gamma_k_direct, n, d_k)
    eps_k_exact = (1 - eps_m) * eps_k_sic + eps_m * eps_k_direct
    eps_k_approx = min(mpf(1), eps_k_sic + eps_m)
    return {
        "eps_m": eps_m,
        "eps_k_sic": eps_k_sic,
        "eps_k_direct": eps_k_direct,
        "eps_k_exact": eps_k_exact,
        "eps_k_approx": eps_k_approx,
    }


def u_fp(z_b, z_e, sigma2, n, d_m, d_k, p_sigma, p_m, mode):
    p_k = p_sigma - p_m
    total = mpf(0)
    for z, sign in ((z_b, 1), (z_e, -1)):
        e = link_errors(z, sigma2, n, d_m, d_k, p_m, p_k)
        eps_k = {"sic": e["eps_k_sic"], "exact": e["eps_k_exact"],
                 "approx": e["eps_k_approx"]}[mode]
        total += sign * (1 - e["eps_m"]) * (1 - 2 * eps_k)
    return total


# ======================================================================
# Fixture table
# ======================================================================

def build():
    fx = {}
    fx["q_at_1"] = q_function(mpf(1))
    fx["q_at_minus_2_5"] = q_function(mpf("-2.5"))
    fx["q_at_0_1"] = q_function(mpf("0.1"))
    fx["eps_64_16_at_4_5"] = fbl_error(mpf("4.5"), 64, 16)
    fx["eps_64_60_at_0_1"] = fbl_error(mpf("0.1"), 64, 60)
    fx["eps_64_30_at_0_25"] = fbl_error(mpf("0.25"), 64, 30)

    # Reference link point: unit-gain receiver and a -10 dB receiver at
    # the same strategy (n=64, d_m=16, d_k=30, p_m=8, p_k=2, sigma2=1).
    z_eve = mpf(10) ** mpf("-1")
    strong = link_errors(mpf(1), mpf(1), 64, 16, 30, mpf(8), mpf(2))
    weak = link_errors(z_eve, mpf(1), 64, 16, 30, mpf(8), mpf(2))
    for name, value in strong.items():
        fx[f"link_strong_{name}"] = value
    for name, value in weak.items():
        fx[f"link_weak_{name}"] = value

    for mode in ("sic", "exact", "approx"):
        fx[f"u_fp_30_8_{mode}"] = u_fp(mpf(1), z_eve, mpf(1), 64, 16, 30,
                                       mpf(10), mpf(8), mode)
    return fx


def main():
    fx = build()
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures.py"
    lines = [
        '"""Frozen high-precision reference values.',
        "",
        "Generated by tools/gen_fixtures.py (50-digit interval-free",
        "recomputation, rounded once to binary64). Do not edit by hand.",
        '"""',
        "",
        "HIGH_PRECISION = {",
    ]
    for name in sorted(fx):
        lines.append(f'    "{name}": {float(fx[name])!r},')
    lines.append("}")
    out.parent.mkdir(exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(fx)} values)")


if __name__ == "__main__":
    main()
