"""Two-parameter Mittag-Leffler function E_{a,b}(z) = sum_k z^k / Gamma(a k + b).

Three evaluation paths:

* ``ml_series`` -- the plain truncated series in double precision;
* ``ml_eval`` -- scalar evaluation to a requested relative tolerance, choosing
  between the large-|z| expansion and an extended-precision series;
* ``ImagAxisKernel`` -- vectorised E(i t) for real arrays t, used as the
  quadrature kernel (piecewise Chebyshev below a crossover, expansion above).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .gamma import log_abs_gamma, rgamma, rgamma_sign


class UnsupportedParameters(ValueError):
    pass


class SeriesOverflow(ArithmeticError):
    pass


class SectorConditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta: float

    def __post_init__(self):
        a, b = self.alpha, self.beta
        if not (math.isfinite(a) and math.isfinite(b)) or not (0.0 < a <= 1.0) or not b > 0.0:
            raise UnsupportedParameters(f"unsupported (α,β) = ({a}, {b})")

    @property
    def is_exponential(self) -> bool:
        return self.alpha == 1.0 and self.beta == 1.0


def ml_series(params: MLParams, z: complex, n_terms: int) -> complex:
    """Sum the first ``n_terms`` terms in ascending k, in double precision."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    a, b = params.alpha, params.beta
    z = complex(z)
    total = 0j
    for k in range(n_terms):
        x = a * k + b
        try:
            if x > 171.0:
                if z == 0:
                    break
                term = cmath.exp(k * cmath.log(z) - log_abs_gamma(x))
            else:
                term = z**k * rgamma(x)
        except OverflowError as exc:
            raise SeriesOverflow("series overflow; use ml_eval") from exc
        total += term
        if not (math.isfinite(total.real) and math.isfinite(total.imag)):
            raise SeriesOverflow("series overflow; use ml_eval")
    return total


def _log_peak_term(a: float, b: float, r: float) -> tuple[float, int]:
    """log of the largest |term| and the index where it sits."""
    if r == 0.0:
        return -log_abs_gamma(b) if b < 171 else 0.0, 0
    lr = math.log(r)
    best, kbest = -math.inf, 0
    k = 0
    while True:
        lt = k * lr - log_abs_gamma(a * k + b)
        if lt > best:
            best, kbest = lt, k
        elif k > kbest + 8 and lt < best - 60.0:
            break
        k += 1
    return best, kbest


def _series_mp(a: float, b: float, z: complex, tol: float) -> complex:
    """Series summed at a working precision that absorbs the cancellation."""
    if z == 0:
        return complex(rgamma(b))
    peak, kpeak = _log_peak_term(a, b, abs(z))
    dps = 25 + max(0, int(peak / math.log(10.0))) + int(-math.log10(tol))
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z.real, z.imag)
        ma, mb = mpmath.mpf(a), mpmath.mpf(b)
        stop = mpmath.mpf(tol) * mpmath.mpf(10) ** -6
        s = mpmath.mpc(0)
        zk = mpmath.mpc(1)
        k = 0
        while True:
            term = zk * mpmath.rgamma(ma * k + mb)
            s += term
            if k > kpeak + 2 and abs(term) <= stop * abs(s):
                break
            zk *= zz
            k += 1
        return complex(s)


def _rgamma_log(x: float) -> tuple[float, float]:
    """(sign, log|1/Gamma(x)|); sign 0 at the poles."""
    sgn = rgamma_sign(x)
    if sgn == 0.0:
        return 0.0, -math.inf
    return sgn, -log_abs_gamma(x)


def _asymptotic(a: float, b: float, z: complex, tol: float, max_terms: int = 400) -> tuple[complex, float]:
    """Large-|z| expansion and an error estimate from the first omitted term.

    Algebraic part -sum_k z^-k / Gamma(b - a k); the exponential part
    (1/a) z^((1-b)/a) exp(z^(1/a)) is added for |arg z| <= a*pi (half of it
    on the Stokes line itself).
    """
    r = abs(z)
    th = cmath.phase(z)
    logz = complex(math.log(r), th)
    val = 0j
    lim = a * math.pi
    if abs(th) <= lim * (1 + 1e-14):
        w = cmath.exp((1.0 - b) / a * logz + cmath.exp(logz / a)) / a
        if abs(abs(th) - lim) <= 1e-14 * lim:
            w *= 0.5
        val += w
    lr = math.log(r)
    alg = 0j
    prev_env = math.inf
    err = 0.0
    for k in range(1, max_terms + 1):
        x = b - a * k
        # envelope ignores the sin factor so that zero terms do not fake convergence
        env = (-lgamma_abs_refl(x)) - k * lr
        if env > prev_env and k > 1:
            err = math.exp(prev_env)
            break
        prev_env = env
        sgn, lg = _rgamma_log(x)
        if sgn != 0.0:
            alg -= sgn * cmath.exp(lg - k * logz)
        if math.exp(env) <= 1e-3 * tol * max(abs(val + alg), 1e-300):
            err = math.exp(env)
            break
    else:
        err = math.exp(prev_env)
    return val + alg, err


def lgamma_abs_refl(x: float) -> float:
    """-log of the envelope |Gamma(1-x)|/pi of 1/Gamma(x) (x <= 1/2), or log|Gamma(x)|."""
    if x >= 0.5:
        return log_abs_gamma(x)
    return math.log(math.pi) - log_abs_gamma(1.0 - x)


def ml_eval(params: MLParams, z: complex, tol: float = 1e-12) -> complex:
    """E_{a,b}(z) to relative tolerance ``tol`` (1e-14 <= tol <= 1e-6)."""
    if not isinstance(params, MLParams):
        params = MLParams(*params)
    if not 1e-14 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    a, b = params.alpha, params.beta
    out = None
    if abs(z) >= 1.0:
        val, err = _asymptotic(a, b, z, tol)
        if err <= tol * abs(val):
            out = val
    if out is None:
        out = _series_mp(a, b, z, tol)
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise ArithmeticError("E_{α,β}(z) is not representable in double precision")
    return out


def ml_bound_ratio(params: MLParams, t: float) -> float:
    """|E(i t)| * (1 + |t|); bounded in t whenever i*t lies in the decay sector."""
    if params.alpha >= 1.0:
        raise SectorConditionViolated("sector condition violated")
    return abs(ml_eval(params, complex(0.0, t), 1e-12)) * (1.0 + abs(t))


# -- vectorised kernel on the imaginary axis ---------------------------------

_CHEB_DEG = 24


def _cheb_nodes(n: int) -> np.ndarray:
    return np.cos(np.pi * (np.arange(n) + 0.5) / n)


def _cheb_coeffs(values: np.ndarray) -> np.ndarray:
    n = len(values)
    k = np.arange(n)
    theta = np.pi * (k + 0.5) / n
    c = np.array([2.0 / n * np.sum(values * np.cos(j * theta)) for j in range(n)])
    c[0] /= 2.0
    return c


class ImagAxisKernel:
    """Vectorised t -> E_{a,b}(i t) for real t.

    Below the crossover T the function is tabulated as piecewise Chebyshev
    interpolants of extended-precision series values; above T the large-|z|
    expansion is evaluated with a fixed number of terms.
    """

    def __init__(self, params: MLParams, tol: float = 1e-13):
        self.params = params
        self.tol = tol
        if params.is_exponential:
            self.crossover = 0.0
            return
        a, b = params.alpha, params.beta
        self._origin = rgamma(b)
        self.crossover = self._find_crossover(a, b, tol)
        self._setup_tail(a, b, tol)
        self._setup_panels(a, b, tol)

    @staticmethod
    def _find_crossover(a: float, b: float, tol: float) -> float:
        t = 1.0
        while True:
            val, err = _asymptotic(a, b, complex(0.0, t), tol)
            if err <= 0.1 * tol * max(abs(val), 1.0 / (1.0 + t)):
                return t
            t *= 1.05

    def _setup_tail(self, a: float, b: float, tol: float) -> None:
        T = self.crossover
        lT = math.log(T)
        val, _ = _asymptotic(a, b, complex(0.0, T), tol)
        target = 0.1 * tol * max(abs(val), 1.0 / (1.0 + T))
        coeffs = []
        prev_env = math.inf
        for k in range(1, 400):
            x = b - a * k
            env = -lgamma_abs_refl(x) - k * lT
            if env > prev_env or math.exp(env) <= target:
                break
            prev_env = env
            sgn, lg = _rgamma_log(x)
            # scaled by T^-k; the tail is summed in powers of T/s <= 1
            coeffs.append(-sgn * math.exp(lg - k * lT) * (1j) ** (-k) if sgn != 0.0 else 0j)
        self._tail_coeffs = np.array(coeffs, dtype=complex)
        lim = a * math.pi
        th = math.pi / 2
        self._exp_weight = 0.0
        if th <= lim * (1 + 1e-14):
            self._exp_weight = 0.5 if abs(th - lim) <= 1e-14 * lim else 1.0

    def _setup_panels(self, a: float, b: float, tol: float) -> None:
        n = _CHEB_DEG + 1
        x = _cheb_nodes(n)
        T = self.crossover

        def fit(lo, hi):
            ts = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
            vals = np.array([_series_mp(a, b, complex(0.0, t), 1e-15) for t in ts])
            c = _cheb_coeffs(vals)
            return c, np.max(np.abs(vals))

        panels = []
        stack = [(0.0, T)] if T <= 4.0 else [(4.0 * i, min(4.0 * (i + 1), T)) for i in range(int(math.ceil(T / 4.0)))]
        stack.reverse()
        while stack:
            lo, hi = stack.pop()
            c, scale = fit(lo, hi)
            # coefficient tail as the interpolation error proxy
            if np.max(np.abs(c[-3:])) > 0.1 * tol * scale and hi - lo > 1e-3:
                mid = 0.5 * (lo + hi)
                stack.append((mid, hi))
                stack.append((lo, mid))
                continue
            panels.append((lo, hi, c))
        panels.sort(key=lambda p: p[0])
        self._edges = np.array([p[0] for p in panels] + [panels[-1][1]])
        self._coeffs = np.array([p[2] for p in panels])

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.params.is_exponential:
            return np.exp(1j * t)
        at = np.abs(t)
        out = np.empty(t.shape, dtype=complex)
        low = at < self.crossover
        if np.any(low):
            out[low] = self._eval_panels(at[low])
        high = ~low
        if np.any(high):
            out[high] = self._eval_tail(at[high])
        neg = np.signbit(t)
        out[neg] = np.conj(out[neg])
        out[at == 0.0] = self._origin
        return out

    def _eval_panels(self, s: np.ndarray) -> np.ndarray:
        edges = self._edges
        idx = np.clip(np.searchsorted(edges, s, side="right") - 1, 0, len(self._coeffs) - 1)
        lo, hi = edges[idx], edges[idx + 1]
        x = (2.0 * s - (lo + hi)) / (hi - lo)
        c = self._coeffs
        b1 = np.zeros(s.shape, dtype=complex)
        b2 = np.zeros(s.shape, dtype=complex)
        for j in range(c.shape[1] - 1, 0, -1):
            b1, b2 = 2.0 * x * b1 - b2 + c[idx, j], b1
        return x * b1 - b2 + c[idx, 0]

    def _eval_tail(self, s: np.ndarray) -> np.ndarray:
        a, b = self.params.alpha, self.params.beta
        inv = self.crossover / s
        acc = np.zeros(s.shape, dtype=complex)
        for ck in self._tail_coeffs[::-1]:
            acc = (acc + ck) * inv
        if self._exp_weight:
            logz = np.log(s) + 0.5j * np.pi
            acc = acc + self._exp_weight / a * np.exp((1.0 - b) / a * logz + np.exp(logz / a))
        return acc


@lru_cache(maxsize=32)
def imag_axis_kernel(alpha: float, beta: float) -> ImagAxisKernel:
    return ImagAxisKernel(MLParams(alpha, beta))
