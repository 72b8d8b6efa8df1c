import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from osc_decay.phase_algebra import (
    Amplitude,
    EmptySupport,
    NormalizationWarning,
    NotNormalized,
    PhaseSyntaxError,
    PolynomialPhase,
    eval_amplitude,
    eval_phase,
    eval_phase_exact,
    format_phase,
    gradient,
    parse_amplitude,
    parse_phase,
    smooth_step,
    taylor_support,
)

coeffs = st.fractions(min_value=-50, max_value=50, max_denominator=64).filter(lambda c: c != 0)
term_maps = st.dictionaries(
    st.tuples(st.integers(0, 9), st.integers(0, 9)), coeffs, min_size=1, max_size=10
)


class TestParse:
    def test_examples(self):
        assert parse_phase("x^2*y^2").terms == {(2, 2): 1}
        assert parse_phase("x^3 + y^3").terms == {(3, 0): 1, (0, 3): 1}
        assert parse_phase("x^2 - y^2").terms == {(2, 0): 1, (0, 2): -1}

    def test_aliases_and_whitespace(self):
        a = parse_phase("  x1^2 *x2 -  3/4*x2^4")
        b = parse_phase("x^2*y-3/4*y^4")
        assert a == b

    def test_decimals_are_exact(self):
        f = parse_phase("0.25*x^2 + 0.1*y^2")
        assert f.terms[(2, 0)] == Fraction(1, 4)
        assert f.terms[(0, 2)] == Fraction(1, 10)

    def test_like_terms_combine(self):
        f = parse_phase("x^2 + 2*x^2 - y^3 + x*x*y^0 + y^3")
        assert f.terms == {(2, 0): 4}

    def test_repeated_variable_multiplies(self):
        assert parse_phase("x*y*x^2*y").terms == {(3, 2): 1}

    def test_double_star_power(self):
        assert parse_phase("x**2*y**3") == parse_phase("x^2*y^3")

    @pytest.mark.parametrize(
        "text,offset",
        [("x^^2", 2), ("x^2 +", 5), ("x^2 $ y", 4), ("2x", 1), ("x^1.5", 2), ("3/0*x^2", 0)],
    )
    def test_syntax_error_offset(self, text, offset):
        with pytest.raises(PhaseSyntaxError) as err:
            parse_phase(text)
        assert err.value.offset == offset
        assert "byte offset" in str(err.value)

    def test_offset_counts_bytes(self):
        with pytest.raises(PhaseSyntaxError) as err:
            parse_phase("x^2 + é")
        assert err.value.offset == 6

    def test_zero_polynomial(self):
        with pytest.raises(EmptySupport, match="empty Taylor support"):
            parse_phase("x^2 - x^2")

    def test_low_order_terms_warn_but_parse(self):
        with pytest.warns(NormalizationWarning):
            f = parse_phase("x + y^2")
        assert f.terms == {(1, 0): 1, (0, 2): 1}
        with pytest.raises(NotNormalized):
            f.require_normalized()

    def test_normalized_input_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            parse_phase("x^2*y + y^4")


class TestFormat:
    def test_canonical(self):
        assert format_phase(parse_phase("y^3 + x^3")) == "y^3 + x^3"
        assert format_phase(parse_phase("-1/2*x^2*y + 3*y^4")) == "3*y^4 - 1/2*x^2*y"
        assert format_phase(parse_phase("x^2 - y^2")) == "-y^2 + x^2"

    @given(term_maps)
    def test_parse_print_roundtrip(self, terms):
        f = PolynomialPhase(terms)
        assert parse_phase(format_phase(f), warn=False) == f


class TestEval:
    def test_examples(self):
        assert eval_phase(parse_phase("x^2*y^2"), 1, 1) == 1
        assert eval_phase(parse_phase("x^3+y^3"), 2, 1) == 9
        assert eval_phase(parse_phase("x^2-y^2"), 0.5, 0.5) == 0

    @given(term_maps, st.floats(-2, 2), st.floats(-2, 2))
    def test_matches_term_by_term(self, terms, x, y):
        f = PolynomialPhase(terms)
        exact = eval_phase_exact(f, x, y)
        scale = sum(abs(float(c)) * abs(x) ** j * abs(y) ** k for (j, k), c in f.terms.items())
        assert abs(eval_phase(f, x, y) - float(exact)) <= 1e-14 * max(scale, 1e-300)

    def test_vectorised(self):
        f = parse_phase("x^2*y + y^4")
        X, Y = np.meshgrid(np.linspace(-1, 1, 7), np.linspace(-1, 1, 5))
        out = eval_phase(f, X, Y)
        assert out.shape == X.shape
        assert np.allclose(out, X**2 * Y + Y**4, rtol=0, atol=1e-15)

    def test_taylor_support(self):
        assert taylor_support(parse_phase("x^2*y^2")) == [(2, 2)]
        assert taylor_support(parse_phase("x^3+y^3")) == [(0, 3), (3, 0)]
        assert taylor_support(parse_phase("x^2+x*y^3")) == [(1, 3), (2, 0)]

    def test_gradient(self):
        fx, fy = gradient(parse_phase("x^3 + 2*x*y^2"))
        assert fx == parse_phase("3*x^2 + 2*y^2")
        assert fy == parse_phase("4*x*y")
        fx, fy = gradient(parse_phase("x^4"))
        assert fy is None


class TestAmplitude:
    def test_examples(self):
        bump = Amplitude.bump(1.0)
        assert eval_amplitude(bump, 0.5, 0) == 1.0
        assert eval_amplitude(bump, 3, 0) == 0.0
        assert eval_amplitude(Amplitude.indicator(1.0), 0.2, 0.3) == 1.0

    def test_bump_range_and_monotone(self):
        r = np.linspace(0, 3, 1000)
        v = eval_amplitude(Amplitude.bump(1.0), r, 0 * r)
        assert np.all((0 <= v) & (v <= 1))
        assert np.all(np.diff(v) <= 0)
        assert np.all(v[r <= 1] == 1) and np.all(v[r >= 2] == 0)

    def test_bump_has_no_jumps(self):
        # max slope of the glued step on [1, 2] stays below 3, so neighbouring
        # samples on a 1e-3 mesh may differ by no more than that
        r = np.linspace(0, 3, 1001)
        v = smooth_step(r)
        h = r[1] - r[0]
        assert np.max(np.abs(np.diff(v))) <= 3.0 * h

    def test_bump_is_radial(self):
        a = Amplitude.bump(0.4)
        th = np.linspace(0, 2 * math.pi, 13)
        v = eval_amplitude(a, 0.6 * np.cos(th), 0.6 * np.sin(th))
        assert np.ptp(v) < 1e-15

    def test_square_indicator(self):
        a = Amplitude.indicator(0.5, "square")
        assert eval_amplitude(a, 0.49, -0.49) == 1.0
        assert eval_amplitude(a, 0.51, 0.0) == 0.0

    def test_polynomial_amplitude(self):
        a = parse_amplitude("poly:1 + x^2")
        assert eval_amplitude(a, 2.0, 5.0) == 5.0
        assert a.sup_norm(1.0) >= 2.0

    def test_support(self):
        assert Amplitude.bump(0.5).support_halfwidth(1.0) == 1.0
        assert Amplitude.bump(0.3).support_halfwidth(1.0) == pytest.approx(0.6)
        assert Amplitude.indicator(2.0).support_halfwidth(1.0) == 1.0
        assert not Amplitude.indicator(1.0).smooth

    @pytest.mark.parametrize("text", ["bump:0", "disk:-1", "cone:1", "bump:x", "poly:"])
    def test_bad_amplitude(self, text):
        with pytest.raises(ValueError):
            parse_amplitude(text)

    def test_str_roundtrip(self):
        for text in ("bump:0.5", "disk:1", "square:0.25"):
            assert str(parse_amplitude(text)) == text
