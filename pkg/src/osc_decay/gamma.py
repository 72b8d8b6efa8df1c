"""Reciprocal and log gamma on the real line (Lanczos, g=7, n=9)."""

from __future__ import annotations

import math

_G = 7.0
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(x: float) -> float:
    # x is the shifted argument (Gamma(x + 1) convention)
    s = _COEFFS[0]
    for i in range(1, len(_COEFFS)):
        s += _COEFFS[i] / (x + i)
    return s


def _sin_pi(x: float) -> float:
    """sin(pi*x), exact zeros at integers.

    x - round(x) is exact in floating point, so no digits are lost near the
    integers where 1/Gamma has its zeros.
    """
    n = round(x)
    d = x - n
    if d == 0.0:
        return 0.0
    s = math.sin(math.pi * d)
    return -s if n % 2 else s


def lgamma_pos(x: float) -> float:
    """log Gamma(x) for x >= 0.5."""
    xm = x - 1.0
    t = xm + _G + 0.5
    return _HALF_LOG_2PI + (xm + 0.5) * math.log(t) - t + math.log(_lanczos_sum(xm))


def log_abs_gamma(x: float) -> float:
    """log|Gamma(x)|; +inf at the poles."""
    if x >= 0.5:
        return lgamma_pos(x)
    s = _sin_pi(x)
    if s == 0.0:
        return math.inf
    return math.log(math.pi / abs(s)) - lgamma_pos(1.0 - x)


def rgamma(x: float) -> float:
    """1/Gamma(x), entire: zero at non-positive integers, reflection below 1/2."""
    if x >= 0.5:
        if x == int(x) and x <= 171.0:
            return 1.0 / math.factorial(int(x) - 1)
        if x > 171.0:
            return math.exp(-lgamma_pos(x))
        xm = x - 1.0
        t = xm + _G + 0.5
        # split the power so t**(xm + 0.5) cannot overflow before exp(-t) cancels it
        p = t ** (0.5 * (xm + 0.5))
        return 1.0 / (math.sqrt(2.0 * math.pi) * p * (p * math.exp(-t)) * _lanczos_sum(xm))
    s = _sin_pi(x)
    if s == 0.0:
        return 0.0
    # 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    lg = lgamma_pos(1.0 - x)
    if lg > 700.0:
        return math.copysign(math.exp(lg + math.log(abs(s) / math.pi)), s)
    return s * math.exp(lg) / math.pi


def rgamma_sign(x: float) -> float:
    """Sign of 1/Gamma(x) (0.0 at the poles)."""
    if x > 0:
        return 1.0
    return math.copysign(1.0, _sin_pi(x)) if _sin_pi(x) != 0.0 else 0.0
