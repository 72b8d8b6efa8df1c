"""Adaptive 2D quadrature for oscillatory and envelope integrals of polynomial phases.

Cells are rectangles either in Cartesian coordinates or, when the amplitude
is supported on a centred disk inside U, in polar coordinates (r, theta).
Each cell carries a tensor Gauss-Kronrod rule; |K - G| is its error
estimate.  Two refinement stages run in deterministic rounds:

* oscillation pre-refinement: every cell is split until the kernel argument
  lambda * f varies by at most 2 pi * rule_order / points_per_wavelength
  along each side;
* error-driven refinement: cells whose error exceeds their share of the
  target are split four ways.

Totals are taken with ``math.fsum`` over per-cell values, so the result does
not depend on the order of evaluation or on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cubature import gauss_subset, kronrod_rule
from .intervals import abs_range, phase_range, polar_bbox
from .ml_special import MLParams, imag_axis_kernel
from .phase_algebra import Amplitude, EmptySupport, PolynomialPhase, eval_amplitude, eval_phase, gradient, smooth_step
from .sublevel import sublevel_measure

TOLERANCE_NOT_MET = "tolerance not met"
_CHUNK = 2048  # cells per evaluation batch; fixed so sums never depend on threading


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-6
    max_cells: int = 4_000_000
    points_per_wavelength: float = 4.0
    rule_order: int = 15  # Gauss points per axis; Kronrod adds rule_order + 1
    threads: int = 1

    def __post_init__(self):
        if not 1e-10 <= self.rel_tol <= 1e-2:
            raise ValueError("rel_tol must lie in [1e-10, 1e-2]")
        if self.max_cells < 1:
            raise ValueError("max_cells must be positive")
        if not self.points_per_wavelength >= 4:
            raise ValueError("points_per_wavelength must be >= 4")
        if self.rule_order < 1:
            raise ValueError("rule_order must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    @property
    def phase_step(self) -> float:
        """Largest admissible variation of the kernel argument along one cell side."""
        return 2.0 * math.pi * self.rule_order / self.points_per_wavelength


@dataclass
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    cells_used: int
    lam: float
    flags: list[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return TOLERANCE_NOT_MET not in self.flags


# ---------------------------------------------------------------- geometry


@dataclass(frozen=True)
class _Domain:
    polar: bool
    cells: np.ndarray  # (n, 4): a0, a1, b0, b1


def _domain(psi: Amplitude, rho: float) -> _Domain:
    if not rho > 0:
        raise ValueError("rho must be positive")
    radial = psi.kind == "bump" or (psi.kind == "indicator" and psi.shape == "disk")
    if radial:
        R = 2.0 * psi.size if psi.kind == "bump" else psi.size
        if R <= rho:
            rb = [0.0, psi.size, R] if psi.kind == "bump" else [0.0, R]
            tb = np.linspace(0.0, 2.0 * math.pi, 9)
            cells = [(r0, r1, t0, t1) for r0, r1 in zip(rb, rb[1:]) for t0, t1 in zip(tb, tb[1:])]
            return _Domain(True, np.array(cells))
    s = psi.support_halfwidth(rho)
    g = np.linspace(-s, s, 5)
    cells = [(a0, a1, b0, b1) for a0, a1 in zip(g, g[1:]) for b0, b1 in zip(g, g[1:])]
    return _Domain(False, np.array(cells))


def _bbox(dom: _Domain, c: np.ndarray):
    if dom.polar:
        return polar_bbox(c[:, 0], c[:, 1], c[:, 2], c[:, 3])
    return c[:, 0], c[:, 1], c[:, 2], c[:, 3]


def _split(cells: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    """Halve cells along x where sx and along y where sy; children keep parent order."""
    a0, a1, b0, b1 = cells.T
    am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
    nx, ny = np.where(sx, 2, 1), np.where(sy, 2, 1)
    reps = nx * ny
    idx = np.repeat(np.arange(len(cells)), reps)
    start = np.cumsum(reps) - reps
    k = np.arange(len(idx)) - start[idx]
    ix = k // ny[idx]  # 0 = lower half, 1 = upper half (only if split)
    iy = k % ny[idx]
    hx, hy = sx[idx], sy[idx]
    lo_a = np.where(hx & (ix == 1), am[idx], a0[idx])
    hi_a = np.where(hx & (ix == 0), am[idx], a1[idx])
    lo_b = np.where(hy & (iy == 1), bm[idx], b0[idx])
    hi_b = np.where(hy & (iy == 0), bm[idx], b1[idx])
    return np.stack([lo_a, hi_a, lo_b, hi_b], axis=1)


def _split_all(cells: np.ndarray) -> np.ndarray:
    a0, a1, b0, b1 = cells.T
    am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
    kids = np.stack(
        [
            np.stack([a0, am, b0, bm], axis=1),
            np.stack([a0, am, bm, b1], axis=1),
            np.stack([am, a1, b0, bm], axis=1),
            np.stack([am, a1, bm, b1], axis=1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 4)


# ---------------------------------------------------------------- integrands


@dataclass(frozen=True)
class _Oscillation:
    """Variation model of a kernel k(s), s = lambda * f."""

    window: float = math.inf  # |s| beyond this: no oscillation left to resolve
    rate: float = 1.0  # bound on the local angular frequency inside the window


def _ml_oscillation(params: MLParams) -> _Oscillation:
    a = params.alpha
    if a == 1.0:
        return _Oscillation()
    T = imag_axis_kernel(a, params.beta).crossover
    c, s = math.cos(math.pi / (2 * a)), abs(math.sin(math.pi / (2 * a)))
    if s < 1e-12 or c >= 0:
        window = T
    else:
        # the exponential term exp((is)^(1/a)) has decayed below 1e-16
        window = max(T, (37.0 / -c) ** a)
    rate = max(1.0, s * window ** (1.0 / a - 1.0) / a)
    return _Oscillation(window, rate)


def _radial_profile(psi: Amplitude):
    if psi.kind == "bump":
        return lambda r: smooth_step(r / psi.size)
    return lambda r: np.ones_like(r)


class _Integrand:
    """Integrand on a per-cell tensor grid: a has shape (N, m, 1), b (N, 1, m)."""

    def __init__(self, f, psi, dom, lam, kernel=None, envelope=False, floor=0.0):
        self.f, self.psi, self.dom, self.lam = f, psi, dom, lam
        self.kernel = kernel
        self.envelope = envelope
        self.floor = floor  # envelope uses max(lam |f|, floor)

    def __call__(self, a, b):
        if self.dom.polar:
            # the disk support is handled by the domain, so psi depends on r only
            x, y = a * np.cos(b), a * np.sin(b)
            p = _radial_profile(self.psi)(a) * a
        else:
            x, y = a, b
            p = eval_amplitude(self.psi, x, y)
        s = self.lam * eval_phase(self.f, x, y)
        if self.envelope:
            return np.abs(p) / (1.0 + np.maximum(np.abs(s), self.floor))
        return self.kernel(s) * p


def _evaluate(g: _Integrand, cells: np.ndarray, n: int, threads: int):
    """Per-cell Kronrod values and |K - G| errors."""
    rule = kronrod_rule(n)
    u, wk = rule.nodes, rule.weights
    gi = gauss_subset(rule)
    wg = rule.gauss_weights[gi]

    def run(c):
        ca, ha = 0.5 * (c[:, 0] + c[:, 1]), 0.5 * (c[:, 1] - c[:, 0])
        cb, hb = 0.5 * (c[:, 2] + c[:, 3]), 0.5 * (c[:, 3] - c[:, 2])
        A = (ca[:, None] + ha[:, None] * u)[:, :, None]
        B = (cb[:, None] + hb[:, None] * u)[:, None, :]
        vals = np.broadcast_to(g(A, B), (len(c), len(u), len(u)))
        jac = ha * hb
        K = ((vals * wk).sum(axis=2) * wk).sum(axis=1) * jac
        sub = vals[:, gi][:, :, gi]
        G = ((sub * wg).sum(axis=2) * wg).sum(axis=1) * jac
        return K, np.abs(K - G)

    chunks = [cells[i : i + _CHUNK] for i in range(0, len(cells), _CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    if not parts:
        return np.zeros(0, dtype=complex), np.zeros(0)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _fsum(values: np.ndarray) -> complex | float:
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


# ---------------------------------------------------------------- refinement


def _angular_derivative(f: PolynomialPhase) -> PolynomialPhase | None:
    """d f / d theta = x f_y - y f_x, or None for radial f."""
    out: dict[tuple[int, int], Fraction] = {}
    for (j, k), c in f.terms.items():
        if k:
            out[(j + 1, k - 1)] = out.get((j + 1, k - 1), 0) + k * c
        if j:
            out[(j - 1, k + 1)] = out.get((j - 1, k + 1), 0) - j * c
    try:
        return PolynomialPhase(out)
    except EmptySupport:
        return None


def _sup_abs(g, box, n):
    if g is None:
        return np.zeros(n)
    return abs_range(*phase_range(g, *box))[1]


def _variation_bound(derivs, dom: _Domain, cells: np.ndarray):
    """Per-direction bounds on the variation of f across each cell.

    Cartesian: sup|f_x| dx and sup|f_y| dy.  Polar: sup|grad f| dr and
    sup|df/dtheta| dtheta.
    """
    box = _bbox(dom, cells)
    n = len(cells)
    da, db = cells[:, 1] - cells[:, 0], cells[:, 3] - cells[:, 2]
    fx, fy = (_sup_abs(g, box, n) for g in derivs[:2])
    if dom.polar:
        return np.hypot(fx, fy) * da, _sup_abs(derivs[2], box, n) * db
    return fx * da, fy * db


def _oscillation_refine(f, dom, cells, lam, osc: _Oscillation, cfg: QuadConfig, flags):
    if lam == 0:
        return cells
    derivs = (*gradient(f), _angular_derivative(f))
    step = cfg.phase_step
    done = []
    while len(cells):
        oa, ob = _variation_bound(derivs, dom, cells)
        oa, ob = lam * oa, lam * ob
        if math.isfinite(osc.window):
            lo, hi = phase_range(f, *_bbox(dom, cells))
            w = osc.window
            inside = np.clip(np.minimum(lam * hi, w) - np.maximum(lam * lo, -w), 0.0, None)
            total = oa + ob
            cap = osc.rate * inside
            scale = np.where(total > cap, cap / np.where(total > 0, total, 1.0), 1.0)
            oa, ob = oa * scale, ob * scale
        sa, sb = oa > step, ob > step
        bad = sa | sb
        done.append(cells[~bad])
        cells = cells[bad]
        if not len(cells):
            break
        if sum(len(d) for d in done) + 4 * len(cells) > cfg.max_cells:
            flags.append(TOLERANCE_NOT_MET)
            done.append(cells)
            break
        cells = _split(cells, sa[bad], sb[bad])
    return np.concatenate(done) if done else cells


def _line_polynomials(f: PolynomialPhase, polar: bool, b: float) -> np.ndarray:
    """Coefficients (lowest degree first) of a -> f on the line with outer coordinate b.

    Cartesian: a = x at y = b.  Polar: a = r at theta = b.
    """
    deg = f.degree
    c = np.zeros(deg + 1)
    cb, sb = (math.cos(b), math.sin(b)) if polar else (0.0, 0.0)
    for j, k, v in f.float_terms():
        if polar:
            c[j + k] += v * cb**j * sb**k
        else:
            c[j] += v * b**k
    return c


def _real_roots(c: np.ndarray, lo: float, hi: float) -> list[float]:
    nz = np.flatnonzero(c)
    if not len(nz) or nz[-1] == 0:
        return []
    r = np.roots(c[: nz[-1] + 1][::-1])
    # near-real pairs at tangencies only add a harmless breakpoint
    r = r[np.abs(r.imag) <= 1e-7 * (1.0 + np.abs(r.real))].real
    return sorted(float(x) for x in r if lo < x < hi)


def _amplitude_breaks(psi: Amplitude, polar: bool, b: float) -> list[float]:
    if psi.kind == "polynomial" or (psi.kind == "indicator" and psi.shape == "square"):
        return []
    radii = [psi.size, 2.0 * psi.size] if psi.kind == "bump" else [psi.size]
    if polar:
        return radii
    return [sg * math.sqrt(R * R - b * b) for R in radii if R > abs(b) for sg in (-1.0, 1.0)]


def _sublevel_mass(f, psi, dom: _Domain, eps: float, rel_tol: float, max_pieces: int = 20000):
    """Integral of psi over {|f| < eps}, as an outer adaptive integral over lines.

    On each line the set is a union of intervals bounded by real roots of
    f = +-eps; psi is integrated over them with Gauss-Legendre.  The outer
    integrand is continuous with square-root corners at tangencies, which the
    adaptive Gauss-Kronrod bisection resolves.
    """
    a_lo, a_hi = float(dom.cells[:, 0].min()), float(dom.cells[:, 1].max())
    b_lo, b_hi = float(dom.cells[:, 2].min()), float(dom.cells[:, 3].max())
    gx, gw = np.polynomial.legendre.leggauss(20)
    profile = _radial_profile(psi)

    def inner(b: float) -> float:
        c = _line_polynomials(f, dom.polar, b)
        lo_c, hi_c = c.copy(), c.copy()
        lo_c[0] += eps
        hi_c[0] -= eps
        cuts = {a_lo, a_hi}
        cuts.update(_real_roots(lo_c, a_lo, a_hi))
        cuts.update(_real_roots(hi_c, a_lo, a_hi))
        cuts.update(x for x in _amplitude_breaks(psi, dom.polar, b) if a_lo < x < a_hi)
        t = np.array(sorted(cuts))
        t0, t1 = t[:-1], t[1:]
        mid = 0.5 * (t0 + t1)
        keep = np.abs(np.polynomial.polynomial.polyval(mid, c)) < eps
        if not np.any(keep):
            return 0.0
        t0, t1 = t0[keep], t1[keep]
        h = 0.5 * (t1 - t0)
        a = (0.5 * (t0 + t1))[:, None] + h[:, None] * gx
        if dom.polar:
            w = profile(a) * a
        else:
            w = eval_amplitude(psi, a, np.full_like(a, b))
        return math.fsum(((w * gw).sum(axis=1) * h).tolist())

    rule = kronrod_rule(7)
    gi = gauss_subset(rule)

    def piece(b0: float, b1: float):
        hb = 0.5 * (b1 - b0)
        v = np.array([inner(0.5 * (b0 + b1) + hb * u) for u in rule.nodes])
        K = float(v @ rule.weights) * hb
        G = float(v[gi] @ rule.gauss_weights[gi]) * hb
        return K, abs(K - G)

    edges = np.linspace(b_lo, b_hi, 9 if dom.polar else 5).tolist()
    if not dom.polar and psi.kind in ("bump", "indicator"):
        for R in ([psi.size, 2.0 * psi.size] if psi.kind == "bump" else [psi.size]):
            edges += [x for x in (-R, R) if b_lo < x < b_hi]
    edges = sorted(set(edges))
    pieces = [(b0, b1, *piece(b0, b1)) for b0, b1 in zip(edges, edges[1:])]
    met = False
    while True:
        total = math.fsum(p[2] for p in pieces)
        err = math.fsum(p[3] for p in pieces)
        if err <= rel_tol * abs(total) or err <= 1e-15:
            met = True
            break
        if len(pieces) > max_pieces:
            break
        cut = err / len(pieces)
        nxt = []
        for b0, b1, K, E in pieces:
            if E > cut:
                m = 0.5 * (b0 + b1)
                nxt += [(b0, m, *piece(b0, m)), (m, b1, *piece(m, b1))]
            else:
                nxt.append((b0, b1, K, E))
        pieces = nxt
    rounding = 64 * np.finfo(float).eps * math.fsum(abs(p[2]) for p in pieces)
    return total, err + rounding, met, len(pieces)


def _adaptive(g: _Integrand, cells: np.ndarray, cfg: QuadConfig, flags: list[str], max_rounds: int = 40):
    n = cfg.rule_order
    vals, errs = _evaluate(g, cells, n, cfg.threads)
    for _ in range(max_rounds):
        total = _fsum(vals)
        l1 = math.fsum(np.abs(vals))
        target = cfg.rel_tol * max(abs(total), 1e-8 * l1)
        err = math.fsum(errs)
        if err <= target or not len(cells):
            break
        bad = errs > target / len(cells)
        if len(cells) + 3 * np.count_nonzero(bad) > cfg.max_cells:
            flags.append(TOLERANCE_NOT_MET)
            break
        kids = _split_all(cells[bad])
        kv, ke = _evaluate(g, kids, n, cfg.threads)
        cells = np.concatenate([cells[~bad], kids])
        vals = np.concatenate([vals[~bad], kv])
        errs = np.concatenate([errs[~bad], ke])
    else:
        flags.append(TOLERANCE_NOT_MET)
    total = _fsum(vals)
    rounding = 64 * np.finfo(float).eps * math.fsum(np.abs(vals))
    err = math.fsum(errs) + rounding
    target = cfg.rel_tol * max(abs(total), 1e-8 * math.fsum(np.abs(vals)))
    if err > max(target, rounding) * 1.0000001 and TOLERANCE_NOT_MET not in flags:
        flags.append(TOLERANCE_NOT_MET)
    return total, err, len(cells)


def _integrate_oscillatory(f, psi, lam, kernel, osc, cfg, rho):
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    dom = _domain(psi, rho)
    flags: list[str] = []
    cells = _oscillation_refine(f, dom, dom.cells, lam, osc, cfg, flags)
    g = _Integrand(f, psi, dom, lam, kernel=kernel)
    value, err, ncells = _adaptive(g, cells, cfg, flags)
    return QuadratureResult(complex(value), float(err), ncells, float(lam), sorted(set(flags)))


# ---------------------------------------------------------------- public API


def integrate_ml(
    f: PolynomialPhase,
    psi: Amplitude,
    params: MLParams,
    lam: float,
    cfg: QuadConfig = QuadConfig(),
    rho: float = 1.0,
) -> QuadratureResult:
    """Integral over U = [-rho, rho]^2 of E_{alpha,beta}(i lam f(x)) psi(x)."""
    kernel = imag_axis_kernel(params.alpha, params.beta)
    return _integrate_oscillatory(f, psi, lam, kernel, _ml_oscillation(params), cfg, rho)


def _exp_kernel(s):
    return np.exp(1j * s)


def integrate_classical(
    f: PolynomialPhase, psi: Amplitude, lam: float, cfg: QuadConfig = QuadConfig(), rho: float = 1.0
) -> QuadratureResult:
    """Integral of exp(i lam f(x)) psi(x) over U."""
    return _integrate_oscillatory(f, psi, lam, _exp_kernel, _Oscillation(), cfg, rho)


def integrate_envelope(
    f: PolynomialPhase,
    psi: Amplitude,
    lam: float,
    cfg: QuadConfig = QuadConfig(),
    rho: float = 1.0,
    region: tuple[str, float] | None = None,
) -> QuadratureResult:
    """Integral of |psi| / (1 + lam |f|), optionally restricted to lam|f| >= M or < M.

    ``region`` is ``("ge", M)`` or ``("lt", M)``.  The indicator is never
    integrated directly: with g = lam |f|,

        int_{g >= M} |psi| / (1 + g) = int |psi| / (1 + max(g, M)) - m / (1 + M),

    where m is the |psi|-mass of {g < M}, computed line by line from the
    exact real roots of f = +-M/lam.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if region is not None and (region[0] not in ("ge", "lt") or not region[1] > 0):
        raise ValueError("region must be ('ge', M) or ('lt', M) with M > 0")
    if region is not None and psi.kind == "polynomial":
        raise ValueError("restricted envelopes need a non-negative amplitude (bump or indicator)")
    dom = _domain(psi, rho)
    flags: list[str] = []
    g = _Integrand(f, psi, dom, lam, envelope=True)
    if region is None:
        value, err, ncells = _adaptive(g, dom.cells, cfg, flags)
        return QuadratureResult(float(value), float(err), ncells, float(lam), flags)
    op, M = region
    if lam == 0:
        # g = 0 everywhere: all of U is below M
        full, err, ncells = _adaptive(g, dom.cells, cfg, flags)
        value = full if op == "lt" else 0.0
        return QuadratureResult(float(value), float(err if op == "lt" else 0.0), ncells, 0.0, flags)
    capped, err_c, n_c = _adaptive(_Integrand(f, psi, dom, lam, envelope=True, floor=M), dom.cells, cfg, flags)
    mass, err_m, met, n_m = _sublevel_mass(f, psi, dom, M / lam, cfg.rel_tol)
    if not met:
        flags.append(TOLERANCE_NOT_MET)
    upper = capped - mass / (1.0 + M)
    err = err_c + err_m / (1.0 + M)
    ncells = n_c + n_m
    if op == "ge":
        value = upper
    else:
        full, err_f, n_f = _adaptive(g, dom.cells, cfg, flags)
        value, err, ncells = full - upper, err + err_f, ncells + n_f
    return QuadratureResult(float(max(value, 0.0)), float(err), ncells, float(lam), sorted(set(flags)))


def dyadic_envelope_bound(
    f: PolynomialPhase,
    psi: Amplitude,
    lam: float,
    K: int | None = None,
    rho: float = 1.0,
    max_depth: int = 16,
    rel_tol: float = 1e-3,
) -> float:
    """Majorant sum_k |A_k| 2^-k ||psi||_inf of the envelope over {lam |f| >= 1}.

    A_k = {2^k <= lam |f| <= 2^(k+1)} inside the support square of psi.  Each
    |A_k| is bounded above by the certified upper measure at 2^(k+1)/lam minus
    the certified lower measure at 2^k/lam.  K defaults to the smallest level
    count covering lam * max|f|.
    """
    s = psi.support_halfwidth(rho)
    lo, hi = abs_range(*phase_range(f, [-s], [s], [-s], [s]))
    fmax = float(hi[0])
    if lam * fmax < 1.0:
        return 0.0
    need = math.ceil(math.log2(lam * fmax))
    if K is None:
        K = max(need, 1)
    if 2.0**K < lam * fmax:
        raise ValueError("dyadic range does not cover domain")
    sup = psi.sup_norm(rho)
    terms = []
    prev_lower = sublevel_measure(f, s, 1.0 / lam, max_depth, rel_tol).lower
    for k in range(K):
        m_next = sublevel_measure(f, s, 2.0 ** (k + 1) / lam, max_depth, rel_tol)
        terms.append(max(m_next.upper - prev_lower, 0.0) * 2.0**-k * sup)
        prev_lower = m_next.lower
    return math.fsum(terms)
