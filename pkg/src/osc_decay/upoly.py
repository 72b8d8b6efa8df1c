"""Exact univariate polynomials over Q: coefficient lists, lowest degree first.

Only what the root-order computation needs: gcd, Yun's squarefree
decomposition and Sturm sequences for counting and isolating real roots.
"""

from __future__ import annotations

from fractions import Fraction

Poly = list  # list[Fraction], lowest degree first, no trailing zeros


def trim(p) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Poly) -> int:
    return len(p) - 1


def derivative(p: Poly) -> Poly:
    return trim([i * p[i] for i in range(1, len(p))])


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        a = trim(a)
    return trim(q), a


def monic(p: Poly) -> Poly:
    return [c / p[-1] for c in p] if p else p


def gcd(a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = c * prod a_i^i with a_i squarefree and coprime.

    Returns the non-constant factors as (a_i, i).
    """
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial")
    out = []
    dp = derivative(p)
    a0 = gcd(p, dp)
    b = divmod_poly(p, a0)[0]
    c = divmod_poly(dp, a0)[0]
    d = _sub(c, derivative(b))
    i = 1
    while degree(b) > 0:
        a = gcd(b, d)
        if degree(a) > 0:
            out.append((a, i))
        b = divmod_poly(b, a)[0]
        c = divmod_poly(d, a)[0]
        d = _sub(c, derivative(b))
        i += 1
    return out


def _sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _signs_at_inf(seq: list[Poly], sign: int) -> list[int]:
    return [(1 if s[-1] > 0 else -1) * (sign ** degree(s)) for s in seq]


def count_real_roots(p: Poly, lo: Fraction | None = None, hi: Fraction | None = None) -> int:
    """Distinct real roots in (lo, hi]; unbounded ends when None."""
    seq = sturm_sequence(p)
    va = _sign_changes(_signs_at_inf(seq, -1) if lo is None else [evaluate(s, lo) for s in seq])
    vb = _sign_changes(_signs_at_inf(seq, 1) if hi is None else [evaluate(s, hi) for s in seq])
    return va - vb


def cauchy_bound(p: Poly) -> Fraction:
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each holding exactly one distinct real root."""
    p = trim(p)
    if degree(p) < 1:
        return []
    seq = sturm_sequence(p)

    def v(x):
        return _sign_changes([evaluate(s, x) for s in seq])

    B = cauchy_bound(p)
    out = []
    stack = [(-B, B, v(-B), v(B))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        n = vlo - vhi
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        vm = v(mid)
        stack.append((mid, hi, vm, vhi))
        stack.append((lo, mid, vlo, vm))
    return sorted(out)


def max_real_root_multiplicity(p: Poly) -> int:
    """Largest multiplicity of a real root of p (0 when p has no real roots)."""
    best = 0
    for factor, mult in squarefree_decomposition(p):
        if mult > best and isolate_real_roots(factor):
            best = mult
    return best
