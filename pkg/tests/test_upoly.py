from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from osc_decay import upoly

t = sympy.Symbol("t")

small_int_polys = st.lists(st.integers(-6, 6), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)
root_lists = st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 4)), min_size=1, max_size=4)


def to_sympy(p):
    return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in p])), t, domain=sympy.QQ)


def from_roots(roots, extra=()):
    """prod (t - r)^mult times prod of the extra factors (coefficient lists)."""
    p = [Fraction(1)]
    factors = [([Fraction(-r), Fraction(1)], m) for r, m in roots] + [(list(map(Fraction, e)), 1) for e in extra]
    for f, m in factors:
        for _ in range(m):
            q = [Fraction(0)] * (len(p) + len(f) - 1)
            for i, a in enumerate(p):
                for j, b in enumerate(f):
                    q[i + j] += a * b
            p = q
    return p


class TestArithmetic:
    @given(small_int_polys, small_int_polys)
    def test_divmod(self, a, b):
        a, b = upoly.trim(a), upoly.trim(b)
        q, r = upoly.divmod_poly(a, b)
        sq, sr = sympy.div(to_sympy(a), to_sympy(b))
        assert (to_sympy(q) == sq) if q else sq.is_zero
        assert (to_sympy(r) == sr) if r else sr.is_zero

    @given(small_int_polys, small_int_polys)
    def test_gcd_matches_sympy(self, a, b):
        g = upoly.gcd(a, b)
        assert to_sympy(g) == to_sympy(upoly.trim(a)).gcd(to_sympy(upoly.trim(b))).monic()

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            upoly.divmod_poly([1, 2], [])


class TestSquarefree:
    @given(root_lists)
    def test_multiplicities_match_sympy(self, roots):
        p = from_roots(roots)
        ours = {upoly.degree(f): m for f, m in upoly.squarefree_decomposition(p)}
        ref = sympy.sqf_list(to_sympy(p))[1]
        assert sorted((m, to_sympy(f).monic()) for f, m in upoly.squarefree_decomposition(p)) == sorted(
            (m, f.monic()) for f, m in ref
        )
        assert all(d > 0 for d in ours)

    def test_zero(self):
        with pytest.raises(ValueError):
            upoly.squarefree_decomposition([])


class TestRealRoots:
    @given(small_int_polys)
    def test_count_matches_sympy(self, c):
        p = upoly.trim(c)
        assert upoly.count_real_roots(p) == len(set(sympy.real_roots(to_sympy(p))))

    @given(small_int_polys)
    def test_isolation(self, c):
        p = upoly.trim(c)
        boxes = upoly.isolate_real_roots(p)
        roots = sorted(set(sympy.real_roots(to_sympy(p))))
        assert len(boxes) == len(roots)
        for (lo, hi), r in zip(boxes, roots):
            assert lo < r <= hi

    @given(root_lists, st.booleans())
    def test_max_real_multiplicity(self, roots, with_complex):
        # an optional (t^2 + 1)^k factor carries multiplicity without real roots
        extra = [[1, 0, 1]] * 3 if with_complex else []
        p = from_roots(roots, extra)
        merged = {}
        for r, m in roots:
            merged[r] = merged.get(r, 0) + m
        assert upoly.max_real_root_multiplicity(p) == max(merged.values())

    def test_no_real_roots(self):
        assert upoly.max_real_root_multiplicity([1, 0, 1]) == 0
        assert upoly.max_real_root_multiplicity([4, 0, 4, 0, 1]) == 0  # (t^2 + 2)^2

    def test_interval_count(self):
        p = from_roots([(1, 1), (2, 1), (3, 1)])
        assert upoly.count_real_roots(p, Fraction(1), Fraction(3)) == 2
        assert upoly.count_real_roots(p, Fraction(0), Fraction(5, 2)) == 2
