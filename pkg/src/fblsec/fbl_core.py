"""Finite-blocklength coding primitives for short-packet links.

Scalar and array forms of the normal-approximation machinery used by the
link model: the Gaussian tail function, Shannon capacity, channel
dispersion, the block error probability of an (n, d) packet, and the
auxiliary decoding-margin function whose Gaussian tail image the error
probability is.

Provides:
    BlockCode             : immutable (n, d) packet description
    q_function(x)         : Gaussian tail probability Q(x)
    capacity(gamma)       : Shannon capacity log2(1 + gamma), bits/symbol
    dispersion(gamma)     : channel dispersion 1 - (1 + gamma)^-2
    omega(gamma, code)    : normalized margin sqrt(n/V) * (C - d/n)
    fbl_error(gamma, code): packet error probability Q(omega * ln 2)
    from_db / to_db       : linear <-> decibel conversion for SNR values

All numeric functions accept either a scalar or an ndarray for `gamma`
and return the matching kind; scalar and array paths run the same
floating-point operations, so mixing them cannot change results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

LN2 = math.log(2.0)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# SNR values are plain linear-scale floats throughout the package.
SNR = float


# ======================================================================
# Packet description
# ======================================================================

@dataclass(frozen=True)
class BlockCode:
    """A short packet: blocklength n in symbols and payload d in bits.

    n must stay in the short-packet regime (n >= 10). d is allowed to be
    non-integral so the key length can be relaxed during optimization,
    but must satisfy 0 <= d <= n.
    """

    n: int
    d: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 10:
            raise ValueError(f"blocklength n must be an integer >= 10, got {self.n}")
        if not np.isfinite(self.d) or not 0.0 <= self.d <= self.n:
            raise ValueError(f"payload d must satisfy 0 <= d <= n, got {self.d}")


# ======================================================================
# dB conversion
# ======================================================================

def from_db(value_db):
    """Convert a decibel power quantity to linear scale."""
    arr = np.asarray(value_db, dtype=float)
    out = np.power(10.0, arr / 10.0)
    return float(out) if arr.ndim == 0 else out


def to_db(value):
    """Convert a positive linear power quantity to decibels."""
    arr = np.asarray(value, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("to_db requires a positive linear value")
    out = 10.0 * np.log10(arr)
    return float(out) if arr.ndim == 0 else out


# ======================================================================
# Numeric kernels
# ======================================================================

def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0, 1) > x).

    Args:
        x: scalar or ndarray, finite.

    Returns:
        Q(x) = erfc(x / sqrt(2)) / 2, elementwise in [0, 1].
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("q_function requires finite input")
    out = 0.5 * erfc(arr * _INV_SQRT2)
    return float(out) if arr.ndim == 0 else out


def capacity(gamma):
    """Shannon capacity log2(1 + gamma) in bits per symbol (unit bandwidth)."""
    arr = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("capacity requires finite gamma >= 0")
    out = np.log1p(arr) / LN2
    return float(out) if arr.ndim == 0 else out


def dispersion(gamma):
    """Channel dispersion 1 - (1 + gamma)^-2, in [0, 1)."""
    arr = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("dispersion requires finite gamma >= 0")
    one_plus = 1.0 + arr
    out = 1.0 - 1.0 / (one_plus * one_plus)
    return float(out) if arr.ndim == 0 else out


def omega(gamma, code: BlockCode):
    """Normalized decoding margin sqrt(n / V(gamma)) * (C(gamma) - d/n).

    The packet error probability equals Q(omega * ln 2), so omega > 0
    means the channel supports the coding rate with margin and omega < 0
    means the packet is in the high-error regime. The dispersion
    vanishes at gamma = 0; the margin is -inf there for d > 0 (no signal,
    undecodable) and +inf for an empty payload, keeping the Q identity
    consistent with fbl_error.
    """
    arr = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("omega requires finite gamma >= 0")
    rate_gap = np.asarray(capacity(arr), dtype=float) - code.d / code.n
    v = np.asarray(dispersion(arr), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sqrt(code.n / v) * rate_gap
    out = np.where(arr == 0.0, -np.inf if code.d > 0 else np.inf, out)
    return float(out) if arr.ndim == 0 else out


def fbl_error(gamma, code: BlockCode):
    """Decoding error probability of an (n, d) packet at SINR gamma.

    Normal approximation for short packets. The error equals 0.5 exactly
    where capacity meets the coding rate d/n, decreases strictly in gamma
    and increases strictly in d. Zero SINR is a defined limit rather than
    a division by zero: 1 for d > 0, 0 for an empty payload.

    Args:
        gamma: SINR on linear scale, scalar or ndarray, >= 0.
        code: packet blocklength and payload size.

    Returns:
        Error probability in [0, 1], same kind and shape as gamma.
    """
    # Scalar fast path. Optimizer boundary bisections call this millions
    # of times; the operations below are the array path's ufunc kernels
    # applied to one element, so both paths return identical bits.
    if getattr(gamma, "ndim", None) == 0 or isinstance(gamma, (int, float)):
        g = float(gamma)
        if not math.isfinite(g) or g < 0.0:
            raise ValueError("fbl_error requires finite gamma >= 0")
        if g == 0.0:
            return 1.0 if code.d > 0 else 0.0
        one_plus = 1.0 + g
        v = 1.0 - 1.0 / (one_plus * one_plus)
        rate_gap = np.log1p(g) / LN2 - code.d / code.n
        # v underflows to 0 for subnormal-scale g; the margin is then an
        # infinity of rate_gap's sign, as in the array path's omega.
        w = math.inf * rate_gap if v == 0.0 else math.sqrt(code.n / v) * rate_gap
        return float(0.5 * erfc(w * LN2 * _INV_SQRT2))

    arr = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("fbl_error requires finite gamma >= 0")
    w = np.asarray(omega(arr, code), dtype=float)
    zero = arr == 0.0
    # Q needs finite input; the zero-SNR margin is +/- inf by convention.
    safe = np.where(zero, 0.0, w)
    eps = 0.5 * erfc(safe * LN2 * _INV_SQRT2)
    eps = np.where(zero, 1.0 if code.d > 0 else 0.0, eps)
    return float(eps) if arr.ndim == 0 else eps
