"""Fold regime: sharp exponents, saturating families, Plancherel, lemma suite."""

import math
from fractions import Fraction

import numpy as np
import pytest

from causticlab.fold import (FoldExperiment, fold_curve, l2_from_coefficients,
                             lemma_62_suite, run_fold, sharp_exponent,
                             two_segment_breakpoint)
from causticlab.oscint import IntegralSpec, evaluate, m_alpha
from causticlab.scaling import geometric_grid

QUICK_GRID = geometric_grid(2.0**-8, 2.0**-16, 7)


def test_sharp_exponent_values():
    assert sharp_exponent(Fraction(0)) == Fraction(1, 6)
    assert sharp_exponent(Fraction(1, 3)) == Fraction(1, 3)
    assert sharp_exponent(Fraction(1)) == Fraction(1, 2)
    assert sharp_exponent(0.2) == pytest.approx((1 + 0.6) / 6)
    assert sharp_exponent(0.5) == pytest.approx(0.375)
    # continuity at the regime change
    assert sharp_exponent(1 / 3 - 1e-9) == pytest.approx(sharp_exponent(1 / 3 + 1e-9),
                                                         abs=1e-8)
    with pytest.raises(ValueError):
        sharp_exponent(1.2)


def test_experiment_side_validation():
    with pytest.raises(ValueError):
        FoldExperiment(0.5, "below")
    with pytest.raises(ValueError):
        FoldExperiment(0.1, "above")
    with pytest.raises(ValueError):
        FoldExperiment(0.2, "at_threshold")
    FoldExperiment(1.0 / 3.0, "at_threshold")  # ok


def test_l2_scaling_below():
    # ||u||_2 = (2 pi h)^{1/2} h^{d/2} ||chi||_2
    exp = FoldExperiment(0.25, "below")
    vals = [l2_from_coefficients(exp, h) / (math.sqrt(2 * math.pi * h) * h**0.125)
            for h in (1e-2, 1e-3, 1e-4)]
    assert np.ptp(vals) / vals[0] < 1e-6
    assert vals[0] == pytest.approx(1.6767261271736364, rel=1e-5)  # ||chi||_2


def test_l2_scaling_above_is_constant():
    exp = FoldExperiment(0.5, "above")
    vals = [l2_from_coefficients(exp, h) for h in (1e-2, 1e-3, 1e-4)]
    assert np.ptp(vals) / vals[0] < 1e-6
    assert vals[0] == pytest.approx(math.sqrt(2 * math.pi) * 1.6767261271736364,
                                    rel=1e-5)


def test_l2_zero_amplitude():
    exp = FoldExperiment(0.25, "below")
    zeroed = exp.amplitude
    assert zeroed.l2_theta(1e-3) > 0  # sanity: the family itself is nonzero
    from causticlab.amplitudes import make_amplitude
    zero = make_amplitude("custom", 0.0, evaluator=lambda u, h: np.zeros_like(u))
    assert zero.l2_theta(1e-3) == 0.0


def test_plancherel_cross_check_x_side():
    # direct x-side quadrature of |u|^2 over a wide window vs the coefficient
    # side, within 1 percent
    cases = [(0.5, "above", 2.0**-6), (0.3, "below", 2.0**-6)]
    for d, side, h in cases:
        exp = FoldExperiment(d, side)
        xs = np.linspace(-8.0, 8.0, 3201)
        vals = np.empty(xs.size)
        for i, x in enumerate(xs):
            res = evaluate(IntegralSpec(exp.phase, exp.amplitude, (float(x),), h,
                                        rel_tol=1e-7, includes_prefactor=False))
            vals[i] = res.abs_value**2
        direct = math.sqrt(np.trapezoid(vals, xs))
        coeff = l2_from_coefficients(exp, h)
        assert direct == pytest.approx(coeff, rel=0.01), (d, side)


def test_run_fold_below_slope():
    run = run_fold(FoldExperiment(0.2, "below", QUICK_GRID))
    assert run.fit.verdict == "pass"
    assert run.fit.slope == pytest.approx((1 + 3 * 0.2) / 6, abs=0.04)


def test_run_fold_above_slope_and_origin_saturation():
    run = run_fold(FoldExperiment(0.5, "above", QUICK_GRID))
    assert run.fit.slope == pytest.approx(0.375, abs=0.04)
    # u(0) alone achieves the h^{-(1+d)/4} growth: sup equals the origin value
    exp = FoldExperiment(0.5, "above", QUICK_GRID)
    for h in QUICK_GRID[:2]:
        origin = evaluate(IntegralSpec(exp.phase, exp.amplitude, (0.0,), h,
                                       rel_tol=1e-7, includes_prefactor=False))
        row = next(r for r in run.rows if r.h == h)
        assert origin.abs_value == pytest.approx(row.sup_abs, rel=1e-9)


def test_threshold_families_agree():
    below = run_fold(FoldExperiment(1.0 / 3.0, "below", QUICK_GRID))
    above = run_fold(FoldExperiment(1.0 / 3.0, "above", QUICK_GRID))
    assert abs(below.fit.slope - above.fit.slope) < 0.05


def test_breakpoint_recovers_synthetic_hinge():
    d = np.linspace(0, 1, 9)
    y = np.where(d <= 0.33, (1 + 3 * d) / 6, (1 + d) / 4)
    bp, sse = two_segment_breakpoint(d, y)
    assert 0.28 <= bp <= 0.38
    assert sse < 1e-4


def test_fold_curve_small():
    curve = fold_curve([0.0, 0.2, 1.0 / 3.0, 0.6, 1.0], QUICK_GRID)
    assert curve.max_slope_error <= 0.04
    assert 0.25 <= curve.breakpoint <= 0.42  # coarse delta grid, looser window


def test_lemma62_rows_and_exponents():
    eps_grid = tuple(float(v) for v in np.geomspace(0.1, 1e-3, 7))
    x_grid = (0.0, 0.5, -0.7, 1.3, 2.0, -1.9)
    rep = lemma_62_suite(eps_grid, x_grid)
    assert rep.max_rel_error < 1e-6
    assert rep.exponent_first == pytest.approx(1.5, abs=0.02)
    assert rep.exponent_second == pytest.approx(1.0, abs=0.02)
    # the x = 0, eps = 0.1 row of the second integral has the closed value
    row = next(r for r in rep.rows
               if r.name == "weighted_cauchy" and r.x == 0.0 and r.eps == 0.1)
    assert row.numeric == pytest.approx(15.707963267948966, abs=1e-5)
    # first integral at x = -eps*alpha equals eps^{-3/2} M(alpha)
    alpha, eps = 1.7, 0.05
    from causticlab.fold import _quad_first
    assert _quad_first(-eps * alpha, eps) == pytest.approx(
        eps**-1.5 * m_alpha(alpha), rel=1e-8)
