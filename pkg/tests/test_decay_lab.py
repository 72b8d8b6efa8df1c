import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osc_decay.decay_lab import (
    SLOPE_LIMIT,
    DegenerateGrid,
    InsufficientSamples,
    build_report,
    epsilon_sweep,
    fit_decay,
    geometric_grid,
    lambda_sweep,
    morse_case_check,
    ratio_trend,
    read_csv,
    theorem_ratio,
    verify_theorem1,
    write_sublevel_csv,
    write_sweep_csv,
)
from osc_decay.integrator import QuadConfig
from osc_decay.ml_special import MLParams
from osc_decay.phase_algebra import parse_amplitude, parse_phase


def model(lams, c, p, q):
    return [(l, c * l**-p * math.log(l) ** q) for l in lams]


class TestFit:
    def test_recovers_log_power(self):
        fit = fit_decay(model(geometric_grid(4, 1e5, 12), 3.0, 0.5, 1.0))
        assert fit.p == pytest.approx(0.5, abs=1e-6)
        assert fit.q == pytest.approx(1.0, abs=1e-6)

    def test_recovers_pure_power(self):
        fit = fit_decay(model(geometric_grid(4, 1e5, 12), 0.7, 1.0, 0.0))
        assert fit.p == pytest.approx(1.0, abs=1e-6)
        assert fit.q == pytest.approx(0.0, abs=1e-6)
        assert fit.residual < 1e-10

    @given(st.floats(0.01, 100), st.floats(0.1, 2.0), st.floats(-2.0, 3.0))
    def test_self_consistency(self, c, p, q):
        fit = fit_decay(model(geometric_grid(2, 1e6, 16), c, p, q))
        assert fit.p == pytest.approx(p, abs=1e-6)
        assert fit.q == pytest.approx(q, abs=1e-6)
        assert fit.log_c == pytest.approx(math.log(c), abs=1e-5)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamples):
            fit_decay(model(geometric_grid(4, 1e3, 7), 1, 1, 0))

    def test_degenerate_grid(self):
        with pytest.raises(DegenerateGrid):
            fit_decay([(100.0, 1e-2)] * 10)

    def test_rejects_small_lambda_and_zeros(self):
        with pytest.raises(ValueError):
            fit_decay(model(geometric_grid(1.5, 1e3, 10), 1, 1, 0))
        with pytest.raises(ValueError):
            fit_decay([(l, 0.0) for l in geometric_grid(4, 1e3, 10)])


class TestRatios:
    def test_theorem_ratio_branches(self):
        lam = 1000.0
        assert theorem_ratio(lam, 2e-3, Fraction(2), 1) == pytest.approx(2e-3 * lam**0.5 / math.log(lam))
        # h = 1 carries the squared logarithm whatever m is
        assert theorem_ratio(lam, 2e-3, Fraction(1), 0) == pytest.approx(2e-3 * lam / math.log(lam) ** 2)

    def test_trend(self):
        lams = geometric_grid(10, 1e5, 9)
        slope, spread = ratio_trend(lams, [l**0.3 for l in lams])
        assert slope == pytest.approx(0.3)
        assert spread == pytest.approx(1e4**0.3)
        assert ratio_trend([10.0], [1.0]) == (0.0, 1.0)

    def test_geometric_grid(self):
        g = geometric_grid(4, 16384, 13)
        assert g[0] == 4 and g[-1] == pytest.approx(16384)
        assert np.allclose(g[1:] / g[:-1], 2)
        assert list(geometric_grid(5, 5, 1)) == [5.0]
        with pytest.raises(ValueError):
            geometric_grid(0, 1, 3)


class TestVerdict:
    def test_model_decay_passes(self):
        r = build_report(model(geometric_grid(4, 16384, 13), 2.0, 0.5, 1.0), [0] * 13, [], Fraction(2), 1)
        v = verify_theorem1(r)
        assert v.passed and v.fields["branch"] == "h>1"
        assert abs(v.fields["slope_per_decade"]) < 1e-12

    def test_extra_logs_fail(self):
        # lam^(-1/h) ln^(m+2) lam outgrows the bound
        r = build_report(model(geometric_grid(4, 16384, 13), 1.0, 0.5, 3.0), [0] * 13, [], Fraction(2), 1)
        v = verify_theorem1(r)
        assert not v.passed
        assert v.fields["slope_per_decade"] > SLOPE_LIMIT
        assert "verdict=FAIL" in v.to_text()

    def test_h1_reports_both_ratios(self):
        r = build_report(model(geometric_grid(4, 16384, 13), 1.0, 1.0, 1.0), [0] * 13, [], Fraction(1), 1)
        v = verify_theorem1(r)
        assert v.passed and v.fields["branch"] == "h=1" and v.fields["log_power"] == 2
        assert v.fields["single_log_pass"] is True
        r = build_report(model(geometric_grid(4, 16384, 13), 1.0, 1.0, 2.0), [0] * 13, [], Fraction(1), 1)
        v = verify_theorem1(r)
        assert v.passed and v.fields["single_log_pass"] is False

    def test_single_point_refuses_fit(self):
        r = build_report([(4.0, 0.1)], [1e-9], [], Fraction(1), 0)
        assert math.isnan(r.fitted_p) and "fit refused" in r.fit_note
        assert not verify_theorem1(r).passed


class TestLambdaSweep:
    def test_disk_bump_decays_like_one_over_lambda(self):
        f, psi = parse_phase("x^2+y^2"), parse_amplitude("bump:0.5")
        r = lambda_sweep(f, psi, MLParams(1.0, 1.0), geometric_grid(16, 1.6e4, 12), QuadConfig(rel_tol=1e-6))
        assert r.h_used == 1 and r.m_used == 0 and not r.excluded
        assert r.fitted_p == pytest.approx(1.0, abs=0.05)
        # stationary point at the centre of a unit-height bump: lam I -> pi
        assert r.samples[-1][1] * r.samples[-1][0] == pytest.approx(math.pi, rel=1e-6)
        assert verify_theorem1(r).passed

    def test_one_point(self):
        r = lambda_sweep(parse_phase("x^2+y^2"), parse_amplitude("bump:0.5"), MLParams(1.0, 1.0), [4.0])
        assert len(r.samples) == 1 and r.fit_note
        assert math.isfinite(r.bound_ratio_max)

    def test_starved_samples_are_excluded(self):
        cfg = QuadConfig(rel_tol=1e-10, max_cells=64)
        r = lambda_sweep(parse_phase("x^2*y^2"), parse_amplitude("bump:0.5"), MLParams(0.5, 1.0), [500.0, 1000.0], cfg)
        assert r.excluded == [500.0, 1000.0] and r.samples == []

    def test_rejects_small_lambda(self):
        with pytest.raises(ValueError):
            lambda_sweep(parse_phase("x^2+y^2"), parse_amplitude("1"), MLParams(1.0, 1.0), [1.0])


class TestEpsilonSweep:
    def test_disk(self):
        grid = geometric_grid(1e-4, 0.25, 8)
        r = epsilon_sweep(parse_phase("x^2+y^2"), grid, max_depth=16, rel_tol=1e-3)
        assert r.regime == "delta=1" and r.delta == 1
        for (e, v), err in zip(r.samples, r.errors):
            assert abs(v - math.pi * e) <= err / 2 + 1e-15
        assert r.fitted_delta == pytest.approx(1.0, abs=1e-2)

    def test_monotone_and_bracketing(self):
        r = epsilon_sweep(parse_phase("x^2*y^2"), geometric_grid(1e-5, 1e-1, 9), rel_tol=1e-2)
        vals = [v for _, v in r.samples]
        assert vals == sorted(vals)
        assert r.regime == "delta<1" and r.m == 1
        assert 0.4 <= r.fitted_delta <= 0.6

    def test_single_epsilon(self):
        r = epsilon_sweep(parse_phase("x^2*y^2"), [0.01])
        assert len(r.samples) == 1 and "fit refused" in r.fit_note


class TestMorse:
    def test_plus_at_one_thousand(self):
        v, rows = morse_case_check("+", [1e3], QuadConfig(rel_tol=1e-7))
        row = rows[0]
        assert row["measure"] == pytest.approx(math.pi / 1e3, rel=2e-3)
        # disk indicator restricted to lam r^2 >= 1: (pi/lam)(ln(1+lam) - ln 2)
        exact = math.pi / 1e3 * (math.log1p(1e3) - math.log(2))
        assert row["envelope"] == pytest.approx(exact, rel=1e-5)

    def test_minus_sweep_passes(self):
        v, rows = morse_case_check("-", geometric_grid(10, 1e4, 4))
        assert v.passed, v.to_text()
        assert len(rows) == 4

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            morse_case_check("*", [10.0])


class TestCSV:
    @settings(max_examples=30)
    @given(st.lists(st.tuples(st.floats(2, 1e8), st.floats(1e-300, 1e3), st.floats(0, 1)), min_size=1, max_size=10))
    def test_sweep_round_trip(self, rows):
        rows.sort()
        samples = [(l, v) for l, v, _ in rows]
        report = build_report(samples, [e for *_, e in rows], [3.5], Fraction(3, 2), 0)
        buf = io.StringIO()
        write_sweep_csv(buf, report, {"phase": "x^3+y^3", "h": "3/2"})
        config, cols, parsed, comments = read_csv(buf.getvalue())
        assert config == {"phase": "x^3+y^3", "h": "3/2"}
        assert cols == ["lambda", "abs_value", "error_estimate", "ratio"]
        assert [(r[0], r[1]) for r in parsed] == samples
        assert [r[3] for r in parsed] == report.ratios
        assert comments == ["excluded lambda = 3.5 (tolerance not met)"]

    def test_sublevel_round_trip(self):
        r = epsilon_sweep(parse_phase("x^2+y^2"), geometric_grid(1e-3, 1e-1, 3))
        buf = io.StringIO()
        write_sublevel_csv(buf, r, {"delta": "1"})
        _, cols, parsed, _ = read_csv(buf.getvalue())
        assert cols == ["epsilon", "measure", "measure_error"]
        assert [(a, b) for a, b, _ in parsed] == r.samples
