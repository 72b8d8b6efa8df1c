"""Vectorised interval enclosures of polynomial phases over axis-aligned boxes.

Every function works on arrays of boxes at once.  Results are widened by a
few ulps so that floating-point rounding cannot make an enclosure too tight.
"""

from __future__ import annotations

import numpy as np

from .phase_algebra import PolynomialPhase

_PAD = 8 * np.finfo(float).eps


def ipow(lo: np.ndarray, hi: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 0:
        return np.ones_like(lo), np.ones_like(hi)
    a, b = lo**n, hi**n
    if n % 2:
        return a, b
    plo = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(a, b))
    return plo, np.maximum(a, b)


def imul(alo, ahi, blo, bhi):
    p = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    return p.min(axis=0), p.max(axis=0)


def phase_range(f: PolynomialPhase, xlo, xhi, ylo, yhi) -> tuple[np.ndarray, np.ndarray]:
    """Enclosure [lo, hi] of f over each box [xlo,xhi] x [ylo,yhi] (natural extension)."""
    xlo, xhi, ylo, yhi = (np.asarray(v, dtype=float) for v in (xlo, xhi, ylo, yhi))
    lo = np.zeros(np.broadcast(xlo, ylo).shape)
    hi = np.zeros_like(lo)
    xp, yp = {}, {}
    scale = np.zeros_like(lo)
    for j, k, c in f.float_terms():
        if j not in xp:
            xp[j] = ipow(xlo, xhi, j)
        if k not in yp:
            yp[k] = ipow(ylo, yhi, k)
        mlo, mhi = imul(*xp[j], *yp[k])
        if c >= 0:
            lo += c * mlo
            hi += c * mhi
        else:
            lo += c * mhi
            hi += c * mlo
        scale += abs(c) * np.maximum(np.abs(mlo), np.abs(mhi))
    pad = _PAD * (scale + 1e-300)
    return lo - pad, hi + pad


def abs_range(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Enclosure of |f| from an enclosure of f."""
    alo = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    return alo, np.maximum(np.abs(lo), np.abs(hi))


def cos_range(t0: np.ndarray, t1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Range of cos over [t0, t1] (t1 - t0 <= 2 pi)."""
    c0, c1 = np.cos(t0), np.cos(t1)
    lo, hi = np.minimum(c0, c1), np.maximum(c0, c1)
    # maxima at 2 pi n, minima at pi + 2 pi n
    has_max = np.floor(t1 / (2 * np.pi)) * 2 * np.pi >= t0
    has_min = np.floor((t1 - np.pi) / (2 * np.pi)) * 2 * np.pi + np.pi >= t0
    return np.where(has_min, -1.0, lo), np.where(has_max, 1.0, hi)


def polar_bbox(r0, r1, t0, t1):
    """Cartesian bounding box of the annular sectors r in [r0,r1], theta in [t0,t1]."""
    clo, chi = cos_range(t0, t1)
    slo, shi = cos_range(t0 - np.pi / 2, t1 - np.pi / 2)
    xlo, xhi = imul(r0, r1, clo, chi)
    ylo, yhi = imul(r0, r1, slo, shi)
    return xlo, xhi, ylo, yhi
