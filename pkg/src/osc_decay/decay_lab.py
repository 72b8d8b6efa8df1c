"""Decay sweeps in lambda and epsilon, log-power fits and bound verdicts.

The bounds being tested have unknown constants, so verdicts are about
trends: a ratio such as |I| lambda^(1/h) / ln^m lambda passes when its
least-squares slope against log10(lambda) is at most ``SLOPE_LIMIT``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .integrator import (
    QuadConfig,
    integrate_envelope,
    integrate_ml,
)
from .ml_special import MLParams
from .newton_geometry import analyze
from .phase_algebra import Amplitude, PolynomialPhase, parse_phase
from .sublevel import SublevelMeasure, sublevel_measure

__all__ = [
    "SLOPE_LIMIT",
    "DecayReport",
    "FitResult",
    "InsufficientSamples",
    "DegenerateGrid",
    "SublevelMeasure",
    "SublevelReport",
    "Verdict",
    "epsilon_sweep",
    "fit_decay",
    "geometric_grid",
    "lambda_sweep",
    "morse_case_check",
    "ratio_trend",
    "sublevel_measure",
    "theorem_ratio",
    "verify_theorem1",
]

SLOPE_LIMIT = 0.05
MIN_FIT_SAMPLES = 8


class InsufficientSamples(ValueError):
    pass


class DegenerateGrid(ValueError):
    pass


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return f"{x:.17g}"


def geometric_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1 or not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi and n >= 1")
    return np.geomspace(lo, hi, n) if n > 1 else np.array([float(lo)])


# ---------------------------------------------------------------- fitting


@dataclass(frozen=True)
class FitResult:
    p: float
    q: float
    log_c: float
    residual: float  # RMS of the log residuals


def fit_decay(samples: Sequence[tuple[float, float]]) -> FitResult:
    """Least-squares fit of ln|I| = ln C - p ln(lam) + q ln(ln(lam))."""
    if len(samples) < MIN_FIT_SAMPLES:
        raise InsufficientSamples(f"fit needs at least {MIN_FIT_SAMPLES} samples, got {len(samples)}")
    lam = np.array([s[0] for s in samples], dtype=float)
    val = np.abs(np.array([s[1] for s in samples], dtype=float))
    if np.any(lam < 2):
        raise ValueError("fit needs lambda >= 2 so that ln(lambda) > 0")
    if np.any(val <= 0) or not np.all(np.isfinite(val)):
        raise ValueError("fit needs positive finite values")
    L = np.log(lam)
    X = np.column_stack([np.ones_like(L), -L, np.log(L)])
    if np.linalg.matrix_rank(X) < 3:
        raise DegenerateGrid("singular design matrix: grid too degenerate to separate p and q")
    coef, *_ = np.linalg.lstsq(X, np.log(val), rcond=None)
    res = np.log(val) - X @ coef
    return FitResult(float(coef[1]), float(coef[2]), float(coef[0]), float(np.sqrt(np.mean(res**2))))


def ratio_trend(lams: Sequence[float], ratios: Sequence[float]) -> tuple[float, float]:
    """(slope of log10 ratio against log10 lambda, max/min of the ratios)."""
    r = np.asarray(ratios, dtype=float)
    x = np.log10(np.asarray(lams, dtype=float))
    if len(r) < 2:
        return 0.0, 1.0
    slope = float(np.polyfit(x, np.log10(r), 1)[0])
    return slope, float(r.max() / r.min())


# ---------------------------------------------------------------- lambda sweeps


def log_power(h: Fraction, m: int) -> int:
    """Logarithmic power in the bound: m for h > 1, two on the h = 1 branch."""
    return 2 if h == 1 else m


def theorem_ratio(lam: float, value: float, h: Fraction, m: int, log_pow: int | None = None) -> float:
    k = log_power(h, m) if log_pow is None else log_pow
    return abs(value) * lam ** (1.0 / float(h)) / math.log(lam) ** k


@dataclass
class DecayReport:
    samples: list[tuple[float, float]]
    fitted_p: float
    fitted_q: float
    bound_ratio_max: float
    h_used: Fraction
    m_used: int
    theorem_branch: str  # "h>1" | "h=1"
    errors: list[float] = field(default_factory=list)
    excluded: list[float] = field(default_factory=list)
    fit_residual: float = math.nan
    fit_note: str = ""

    @property
    def ratios(self) -> list[float]:
        return [theorem_ratio(l, v, self.h_used, self.m_used) for l, v in self.samples]


def _branch(h: Fraction) -> str:
    return "h=1" if h == 1 else "h>1"


def build_report(samples, errors, excluded, h: Fraction, m: int) -> DecayReport:
    """Fit and ratio bookkeeping shared by sweeps and by re-reading a CSV."""
    h = Fraction(h)
    ratios = [theorem_ratio(l, v, h, m) for l, v in samples]
    p = q = res = math.nan
    note = ""
    try:
        fit = fit_decay(samples)
        p, q, res = fit.p, fit.q, fit.residual
    except (InsufficientSamples, DegenerateGrid, ValueError) as exc:
        note = f"fit refused: {exc}"
    return DecayReport(
        samples=list(samples),
        fitted_p=p,
        fitted_q=q,
        bound_ratio_max=max(ratios) if ratios else math.nan,
        h_used=h,
        m_used=m,
        theorem_branch=_branch(h),
        errors=list(errors),
        excluded=list(excluded),
        fit_residual=res,
        fit_note=note,
    )


def newton_hm(f: PolynomialPhase, adapted_declared: bool = True) -> tuple[Fraction, int]:
    """(h, m) taking the given coordinates as adapted, so h = d."""
    inv = analyze(f, adapted_declared)
    return inv.distance_d, inv.multiplicity_m


def lambda_sweep(
    f: PolynomialPhase,
    psi: Amplitude,
    params: MLParams,
    grid: Iterable[float],
    cfg: QuadConfig = QuadConfig(),
    rho: float = 1.0,
    h: Fraction | None = None,
    m: int | None = None,
) -> DecayReport:
    """|I(lambda)| on the grid; samples that miss the tolerance are excluded."""
    if h is None or m is None:
        h0, m0 = newton_hm(f)
        h = h0 if h is None else h
        m = m0 if m is None else m
    samples, errors, excluded = [], [], []
    for lam in grid:
        lam = float(lam)
        if lam < 2:
            raise ValueError("lambda grid must start at 2 or above")
        r = integrate_ml(f, psi, params, lam, cfg, rho)
        if not r.converged:
            excluded.append(lam)
            continue
        samples.append((lam, abs(r.value)))
        errors.append(r.abs_error_estimate)
    return build_report(samples, errors, excluded, Fraction(h), int(m))


@dataclass
class Verdict:
    """Named results of a check; ``passed`` decides the exit status."""

    name: str
    passed: bool
    fields: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"check={self.name}", f"verdict={'PASS' if self.passed else 'FAIL'}"]
        for k, v in self.fields.items():
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = fmt(v)
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"


def verify_theorem1(report: DecayReport) -> Verdict:
    """PASS when the bound ratio does not grow along the sweep.

    On the h = 1 branch the sharper single-logarithm ratio is reported too.
    """
    lams = [l for l, _ in report.samples]
    ratios = report.ratios
    slope, spread = ratio_trend(lams, ratios)
    fields = {
        "branch": report.theorem_branch,
        "h": str(report.h_used),
        "m": report.m_used,
        "log_power": log_power(report.h_used, report.m_used),
        "samples": len(lams),
        "excluded": len(report.excluded),
        "bound_ratio_max": float(report.bound_ratio_max),
        "slope_per_decade": slope,
        "ratio_max_over_min": spread,
        "fitted_p": float(report.fitted_p),
        "fitted_q": float(report.fitted_q),
    }
    passed = bool(len(lams) >= 2 and slope <= SLOPE_LIMIT)
    if report.h_used == 1:
        single = [theorem_ratio(l, v, report.h_used, report.m_used, log_pow=1) for l, v in report.samples]
        s1, sp1 = ratio_trend(lams, single)
        fields.update(single_log_slope=s1, single_log_max_over_min=sp1, single_log_pass=bool(s1 <= SLOPE_LIMIT))
    if report.fit_note:
        fields["note"] = report.fit_note
    return Verdict("theorem1", passed, fields)


# ---------------------------------------------------------------- epsilon sweeps


@dataclass
class SublevelReport:
    samples: list[tuple[float, float]]
    fitted_delta: float
    fitted_logpow: float
    regime: str  # "delta<1" | "delta=1" | "delta>1"
    errors: list[float] = field(default_factory=list)
    delta: Fraction | None = None
    m: int | None = None
    fit_note: str = ""


def _regime(delta: Fraction) -> str:
    return "delta<1" if delta < 1 else ("delta=1" if delta == 1 else "delta>1")


def build_sublevel_report(samples, errors, delta: Fraction | None, m: int | None) -> SublevelReport:
    d = q = math.nan
    note = ""
    try:
        fit = fit_decay([(1.0 / e, v) for e, v in samples])
        d, q = fit.p, fit.q
    except (InsufficientSamples, DegenerateGrid, ValueError) as exc:
        note = f"fit refused: {exc}"
    regime = _regime(delta) if delta is not None else "unknown"
    return SublevelReport(list(samples), d, q, regime, list(errors), delta, m, note)


def epsilon_sweep(
    f: PolynomialPhase,
    grid: Iterable[float],
    rho: float = 1.0,
    max_depth: int = 24,
    rel_tol: float = 2e-3,
    delta: Fraction | None = None,
    m: int | None = None,
) -> SublevelReport:
    """Sublevel measures on an epsilon grid with a (delta, log-power) fit in ln(1/eps).

    Certified bounds are tightened across the grid using monotonicity in
    epsilon, which also makes the reported midpoints monotone.
    """
    if delta is None or m is None:
        h0, m0 = newton_hm(f)
        delta = 1 / h0 if delta is None else delta
        m = m0 if m is None else m
    eps = sorted(float(e) for e in grid)
    raw = [sublevel_measure(f, rho, e, max_depth, rel_tol) for e in eps]
    lower = np.maximum.accumulate([r.lower for r in raw])
    upper = np.minimum.accumulate([r.upper for r in raw][::-1])[::-1]
    samples = [(e, float(0.5 * (lo + up))) for e, lo, up in zip(eps, lower, upper)]
    errors = [float(up - lo) for lo, up in zip(lower, upper)]
    return build_sublevel_report(samples, errors, Fraction(delta), m)


# ---------------------------------------------------------------- Morse case


def morse_case_check(
    sign: str,
    lambda_grid: Iterable[float],
    cfg: QuadConfig = QuadConfig(rel_tol=1e-4),
    M: float = 1.0,
    rho: float = 1.0,
    max_depth: int = 24,
) -> tuple[Verdict, list[dict]]:
    """Non-degenerate phase x^2 + y^2 or x^2 - y^2 split at lam |f| = M.

    For each lambda: the measure of {lam |f| <= M} in [-rho, rho]^2 against
    1/lam (plus) or ln(lam)/lam (minus), and the envelope integral over
    {lam |f| >= M} with the disk indicator of radius rho against ln(lam)/lam
    (plus) or ln^2(lam)/lam (minus).
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    f = parse_phase("x^2 + y^2" if sign == "+" else "x^2 - y^2")
    disk = Amplitude.indicator(rho)
    rows = []
    for lam in lambda_grid:
        lam = float(lam)
        if lam < 2:
            raise ValueError("lambda grid must start at 2 or above")
        meas = sublevel_measure(f, rho, M / lam, max_depth, rel_tol=1e-3)
        env = integrate_envelope(f, disk, lam, cfg, rho, region=("ge", M))
        L = math.log(lam)
        mscale = 1.0 / lam if sign == "+" else L / lam
        escale = L / lam if sign == "+" else L * L / lam
        rows.append(
            dict(
                lam=lam,
                measure=meas.measure,
                measure_error=meas.error,
                envelope=env.value,
                envelope_error=env.abs_error_estimate,
                measure_ratio=meas.measure / mscale,
                envelope_ratio=env.value / escale,
            )
        )
    lams = [r["lam"] for r in rows]
    ms, mspread = ratio_trend(lams, [r["measure_ratio"] for r in rows])
    es, espread = ratio_trend(lams, [r["envelope_ratio"] for r in rows])
    passed = ms <= SLOPE_LIMIT and es <= SLOPE_LIMIT
    fields = {
        "sign": sign,
        "M": float(M),
        "rho": float(rho),
        "points": len(rows),
        "measure_slope": ms,
        "measure_max_over_min": mspread,
        "envelope_slope": es,
        "envelope_max_over_min": espread,
    }
    return Verdict("morse", bool(passed), fields), rows


# ---------------------------------------------------------------- CSV


def header_lines(config: dict) -> str:
    return "".join(f"# {k} = {v}\n" for k, v in config.items())


def write_sweep_csv(out: TextIO, report: DecayReport, config: dict) -> None:
    out.write(header_lines(config))
    for lam in report.excluded:
        out.write(f"# excluded lambda = {fmt(lam)} (tolerance not met)\n")
    out.write("lambda,abs_value,error_estimate,ratio\n")
    for (lam, v), e, r in zip(report.samples, report.errors, report.ratios):
        out.write(f"{fmt(lam)},{fmt(v)},{fmt(e)},{fmt(r)}\n")


def write_sublevel_csv(out: TextIO, report: SublevelReport, config: dict) -> None:
    out.write(header_lines(config))
    out.write("epsilon,measure,measure_error\n")
    for (e, v), err in zip(report.samples, report.errors):
        out.write(f"{fmt(e)},{fmt(v)},{fmt(err)}\n")


def read_csv(text: str) -> tuple[dict, list[str], list[list[float]], list[str]]:
    """(header config, column names, rows, other comment lines)."""
    config, comments, rows, cols = {}, [], [], []
    for line in io.StringIO(text):
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, val = body.partition(" = ")
            if sep and not key.startswith("excluded"):
                config[key.strip()] = val.strip()
            else:
                comments.append(body)
            continue
        if not cols:
            cols = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    return config, cols, rows, comments
