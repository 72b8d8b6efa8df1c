"""Sparse polynomial phases f(x, y) with exact rational coefficients, and amplitudes.

Grammar accepted by :func:`parse_phase` (whitespace is ignored)::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := coeff ['*' mono] | mono
    mono   := var ['^' int] ('*' var ['^' int])*
    var    := 'x' | 'y' | 'x1' | 'x2'
    coeff  := int | decimal | int '/' int

Decimals are read as exact ratios over powers of ten.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np


class PhaseSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class EmptySupport(ValueError):
    pass


class NotNormalized(ValueError):
    """f(0,0) != 0 or grad f(0,0) != 0, i.e. a term with j + k <= 1."""


class NormalizationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PolynomialPhase:
    terms: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for (j, k), c in self.terms.items():
            if j < 0 or k < 0:
                raise ValueError("exponents must be non-negative")
            c = Fraction(c)
            if c != 0:
                clean[(int(j), int(k))] = c
        if not clean:
            raise EmptySupport("empty Taylor support")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def from_terms(cls, pairs) -> "PolynomialPhase":
        acc: dict[tuple[int, int], Fraction] = {}
        for (j, k), c in pairs:
            acc[(j, k)] = acc.get((j, k), Fraction(0)) + Fraction(c)
        return cls(acc)

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __eq__(self, other):
        return isinstance(other, PolynomialPhase) and self.terms == other.terms

    def __str__(self):
        return format_phase(self)

    def __repr__(self):
        return f"PolynomialPhase({format_phase(self)!r})"

    @property
    def degree(self) -> int:
        return max(j + k for j, k in self.terms)

    def is_normalized(self) -> bool:
        return all(j + k >= 2 for j, k in self.terms)

    def require_normalized(self) -> None:
        bad = [jk for jk in self.terms if sum(jk) <= 1]
        if bad:
            raise NotNormalized(f"terms {bad} violate f(0)=0, grad f(0)=0")

    def transpose(self) -> "PolynomialPhase":
        return PolynomialPhase({(k, j): c for (j, k), c in self.terms.items()})

    def float_terms(self) -> list[tuple[int, int, float]]:
        return [(j, k, float(c)) for (j, k), c in self.terms.items()]


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:/\d+)?|\.\d+)|(?P<var>x1|x2|x|y)|(?P<op>\*\*|[-+*^]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise PhaseSyntaxError(f"unexpected character {text[pos]!r}", len(text[:pos].encode()))
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if val == "**":
            val = "^"
        toks.append((kind, val, len(text[:start].encode())))
        pos = m.end()
    toks.append(("end", "", len(text.encode())))
    return toks


def _coeff(lit: str) -> Fraction:
    if "/" in lit:
        p, q = lit.split("/")
        if int(q) == 0:
            raise ZeroDivisionError
        return Fraction(int(p), int(q))
    return Fraction(lit)  # exact for decimal literals


def parse_phase(text: str, warn: bool = True) -> PolynomialPhase:
    """Parse ``text`` into a sparse exact polynomial; like terms are combined."""
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, value=None):
        nonlocal i
        tok = toks[i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise PhaseSyntaxError(f"expected {want}, got {got!r}", tok[2])
        i += 1
        return tok

    def factor():
        _, v, _ = take("var")
        e = 1
        if peek()[1] == "^":
            take("op", "^")
            kind, lit, off = take("num")
            if not lit.isdigit():
                raise PhaseSyntaxError("exponent must be a non-negative integer", off)
            e = int(lit)
        return (e, 0) if v in ("x", "x1") else (0, e)

    def term(sign):
        c = Fraction(1)
        j = k = 0
        kind, lit, off = peek()
        if kind == "num":
            take()
            try:
                c = _coeff(lit)
            except ZeroDivisionError:
                raise PhaseSyntaxError("zero denominator", off) from None
            if peek()[1] != "*":
                return (0, 0), sign * c
            take("op", "*")
        dj, dk = factor()
        j, k = j + dj, k + dk
        while peek()[1] == "*":
            take("op", "*")
            dj, dk = factor()
            j, k = j + dj, k + dk
        return (j, k), sign * c

    pairs = []
    sign = 1
    if peek()[0] == "op" and peek()[1] in ("+", "-"):
        sign = -1 if take()[1] == "-" else 1
    pairs.append(term(sign))
    while peek()[0] != "end":
        kind, v, off = peek()
        if v not in ("+", "-"):
            raise PhaseSyntaxError(f"expected '+' or '-', got {v!r}", off)
        take()
        pairs.append(term(-1 if v == "-" else 1))
    acc: dict[tuple[int, int], Fraction] = {}
    for jk, c in pairs:
        acc[jk] = acc.get(jk, Fraction(0)) + c
    if all(c == 0 for c in acc.values()):
        raise EmptySupport("empty Taylor support")
    f = PolynomialPhase(acc)
    if warn and not f.is_normalized():
        warnings.warn(
            "phase has terms with j+k <= 1 (f(0)=0, grad f(0)=0 fails)",
            NormalizationWarning,
            stacklevel=2,
        )
    return f


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(j: int, k: int) -> str:
    parts = []
    if j:
        parts.append("x" if j == 1 else f"x^{j}")
    if k:
        parts.append("y" if k == 1 else f"y^{k}")
    return "*".join(parts)


def format_phase(f: PolynomialPhase) -> str:
    """Canonical text: terms sorted by (j, k), rational coefficients as p/q."""
    out = []
    for n, ((j, k), c) in enumerate(f.terms.items()):
        mono = _fmt_mono(j, k)
        a = abs(c)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if n == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def taylor_support(f: PolynomialPhase) -> list[tuple[int, int]]:
    return sorted(f.terms)


def eval_phase(f: PolynomialPhase, x1, x2):
    """Evaluate f in floating point: Horner in x over rows of fixed j, Horner in y inside.

    Works elementwise on numpy arrays; the summation order is fixed by the
    lexicographic order of (j, k).
    """
    rows: dict[int, dict[int, float]] = {}
    for (j, k), c in f.terms.items():
        rows.setdefault(j, {})[k] = float(c)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    jmax = max(rows)
    acc = np.zeros(np.broadcast(x1, x2).shape)
    for j in range(jmax, -1, -1):
        row = rows.get(j)
        if row is not None:
            kmax = max(row)
            inner = np.zeros_like(acc)
            for k in range(kmax, -1, -1):
                inner = inner * x2 + row.get(k, 0.0)
            acc = acc * x1 + inner
        else:
            acc = acc * x1
    return acc if acc.ndim else float(acc)


def eval_phase_exact(f: PolynomialPhase, x1, x2) -> Fraction:
    x1, x2 = Fraction(x1), Fraction(x2)
    return sum((c * x1**j * x2**k for (j, k), c in f.terms.items()), Fraction(0))


def gradient(f: PolynomialPhase) -> tuple[PolynomialPhase | None, PolynomialPhase | None]:
    """Partial derivatives (None where identically zero)."""

    def mk(d):
        return PolynomialPhase(d) if d else None

    dx = {(j - 1, k): j * c for (j, k), c in f.terms.items() if j > 0}
    dy = {(j, k - 1): k * c for (j, k), c in f.terms.items() if k > 0}
    return mk(dx), mk(dy)


# -- amplitudes ---------------------------------------------------------------


def _glue(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(s):
    """C-infinity cutoff: 1 for s <= 1, 0 for s >= 2."""
    a = _glue(2.0 - np.asarray(s, dtype=float))
    b = _glue(np.asarray(s, dtype=float) - 1.0)
    return a / (a + b)


@dataclass(frozen=True)
class Amplitude:
    """Compactly supported weight psi.

    kind is ``bump`` (radial, 1 on |x| <= sigma and 0 on |x| >= 2 sigma),
    ``indicator`` (shape ``disk`` or ``square`` of the given radius) or
    ``polynomial``.
    """

    kind: str
    size: float = 1.0
    shape: str = "disk"
    poly: PolynomialPhase | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in ("bump", "indicator", "polynomial"):
            raise ValueError(f"unknown amplitude kind {self.kind!r}")
        if self.kind != "polynomial" and not self.size > 0:
            raise ValueError("amplitude size must be positive")
        if self.kind == "indicator" and self.shape not in ("disk", "square"):
            raise ValueError("indicator shape must be 'disk' or 'square'")
        if self.kind == "polynomial" and self.poly is None:
            raise ValueError("polynomial amplitude needs a polynomial")

    @classmethod
    def bump(cls, sigma: float) -> "Amplitude":
        return cls("bump", float(sigma))

    @classmethod
    def indicator(cls, radius: float, shape: str = "disk") -> "Amplitude":
        return cls("indicator", float(radius), shape)

    @classmethod
    def polynomial(cls, poly: PolynomialPhase) -> "Amplitude":
        return cls("polynomial", 1.0, "square", poly)

    @property
    def smooth(self) -> bool:
        return self.kind != "indicator"

    def support_halfwidth(self, rho: float) -> float:
        """Half-width of the smallest centred square holding the support, clipped to U."""
        if self.kind == "bump":
            return min(2.0 * self.size, rho)
        if self.kind == "indicator":
            return min(self.size, rho)
        return rho

    def sup_norm(self, rho: float) -> float:
        """||psi||_inf on U; polynomials by dense sampling with a 5% margin."""
        if self.kind != "polynomial":
            return 1.0
        g = np.linspace(-rho, rho, 1024)
        X, Y = np.meshgrid(g, g)
        return 1.05 * float(np.max(np.abs(eval_phase(self.poly, X, Y))))

    def __str__(self):
        if self.kind == "bump":
            return f"bump:{self.size:g}"
        if self.kind == "indicator":
            return f"{self.shape}:{self.size:g}"
        return f"poly:{format_phase(self.poly)}"


def parse_amplitude(text: str) -> Amplitude:
    """``bump:0.5``, ``disk:1``, ``square:1`` or ``poly:<phase>``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "bump":
            return Amplitude.bump(float(arg))
        if kind in ("disk", "square"):
            return Amplitude.indicator(float(arg), kind)
        if kind == "poly":
            return Amplitude.polynomial(parse_phase(arg, warn=False))
    except ValueError as exc:
        raise ValueError(f"bad amplitude {text!r}: {exc}") from None
    raise ValueError(f"bad amplitude {text!r}; use bump:s, disk:r, square:r or poly:<phase>")


def eval_amplitude(a: Amplitude, x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if a.kind == "bump":
        out = smooth_step(np.hypot(x1, x2) / a.size)
    elif a.kind == "indicator":
        if a.shape == "disk":
            out = (x1 * x1 + x2 * x2 <= a.size * a.size).astype(float)
        else:
            out = ((np.abs(x1) <= a.size) & (np.abs(x2) <= a.size)).astype(float)
    else:
        out = eval_phase(a.poly, x1, x2)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)

