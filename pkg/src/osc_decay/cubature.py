"""Gauss-Kronrod pairs on [-1, 1] and their tensor products on rectangles.

The Kronrod extension of the n-point Gauss-Legendre rule adds the n + 1
zeros of the Stieltjes polynomial E_{n+1}, which is orthogonal to every
polynomial of degree <= n against the weight P_n.  Its Legendre coefficients
come from a small linear system; the weights then follow from requiring
exactness on P_0 .. P_{3n+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as L


@dataclass(frozen=True)
class KronrodRule:
    nodes: np.ndarray  # 2n + 1 Kronrod nodes, ascending
    weights: np.ndarray  # Kronrod weights
    gauss_weights: np.ndarray  # Gauss weights on the nodes (zero at the Stieltjes nodes)

    @property
    def n(self) -> int:
        return (len(self.nodes) - 1) // 2


def _stieltjes_coefficients(n: int) -> np.ndarray:
    """Legendre-series coefficients of E_{n+1}, normalised to lead with P_{n+1}."""
    x, w = L.leggauss(2 * n + 4)  # exact for the degree <= 3n + 1 products below
    P = L.legvander(x, n + 1)  # columns P_0 .. P_{n+1}
    wn = w * P[:, n]
    # unknowns c_0..c_n in E = P_{n+1} + sum c_i P_i, conditions <E P_n, P_j> = 0, j = 0..n
    A = (P[:, : n + 1] * wn[:, None]).T @ P[:, : n + 1]
    b = -(P[:, : n + 1] * wn[:, None]).T @ P[:, n + 1]
    c = np.linalg.lstsq(A, b, rcond=None)[0]
    return np.append(c, 1.0)


@lru_cache(maxsize=None)
def kronrod_rule(n: int) -> KronrodRule:
    if n < 1:
        raise ValueError("Gauss order must be positive")
    gx, gw = L.leggauss(n)
    sx = np.sort(L.legroots(_stieltjes_coefficients(n)).real)
    nodes = np.sort(np.concatenate([gx, sx]))
    nodes = 0.5 * (nodes - nodes[::-1])  # exact antisymmetry
    V = L.legvander(nodes, 3 * n + 1).T
    rhs = np.zeros(3 * n + 2)
    rhs[0] = 2.0
    kw = np.linalg.lstsq(V, rhs, rcond=None)[0]
    kw = 0.5 * (kw + kw[::-1])
    gauss_w = np.zeros_like(nodes)
    for xg, wg in zip(gx, gw):
        gauss_w[np.argmin(np.abs(nodes - xg))] = wg
    gauss_w = 0.5 * (gauss_w + gauss_w[::-1])
    return KronrodRule(nodes, kw, gauss_w)


def gauss_subset(rule: KronrodRule) -> np.ndarray:
    """Indices of the Gauss nodes inside the Kronrod node list."""
    return np.flatnonzero(rule.gauss_weights)
