"""Scan geometry, exponent fits, sweep semantics."""

import math
from fractions import Fraction

import numpy as np
import pytest

from causticlab.amplitudes import make_amplitude
from causticlab.catalog import SingularityType, build_phase, caustic_order
from causticlab.oscint import IntegralSpec, evaluate, evaluate_rescaled
from causticlab.scaling import (ScanPlan, SupRow, fit_exponent, geometric_grid,
                                shell_unit_samples, supnorm_scan, threshold_sweep)


def _rows(hs, vals, conv=True):
    return [SupRow(h, v, (0.0,), conv) for h, v in zip(hs, vals)]


def test_fit_exact_power_law():
    hs = list(geometric_grid(2.0**-4, 2.0**-12, 6))
    fit = fit_exponent(_rows(hs, [h**-0.25 for h in hs]), Fraction(1, 4), 0.01)
    assert fit.slope == pytest.approx(0.25, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.verdict == "pass"


def test_fit_outlier_is_inconclusive():
    hs = list(geometric_grid(2.0**-4, 2.0**-12, 6))
    vals = [h**-0.25 for h in hs]
    vals[3] *= 10.0
    fit = fit_exponent(_rows(hs, vals), Fraction(1, 4), 0.01)
    assert fit.r_squared < 0.98
    assert fit.verdict == "inconclusive"


def test_fit_wrong_slope_fails():
    hs = list(geometric_grid(2.0**-4, 2.0**-12, 6))
    fit = fit_exponent(_rows(hs, [h**-0.4 for h in hs]), Fraction(1, 4), 0.03)
    assert fit.verdict == "fail"


def test_fit_too_few_rows_inconclusive():
    hs = [0.25, 0.125, 0.0625]
    fit = fit_exponent(_rows(hs, [1, 1, 1]), Fraction(0), 0.1)
    assert fit.verdict == "inconclusive"
    assert fit.n_rows == 3


def test_fit_ignores_unconverged_rows():
    hs = list(geometric_grid(2.0**-4, 2.0**-12, 8))
    rows = _rows(hs[:5], [h**-0.25 for h in hs[:5]]) + \
        _rows(hs[5:], [1e9, 1e9, 1e9], conv=False)
    fit = fit_exponent(rows, Fraction(1, 4), 0.01)
    assert fit.verdict == "pass"
    assert fit.n_rows == 5


def test_shell_samples_1d():
    assert shell_unit_samples((Fraction(1, 3),), 1) == [(-1.0,), (1.0,)]


def test_shell_samples_on_unit_shell():
    s = (Fraction(1, 3), Fraction(1, 3), Fraction(2, 3))
    pts = shell_unit_samples(s, 3)
    assert len(pts) > 8
    for y in pts:
        total = sum(abs(v) ** (1.0 / (1.0 - float(sj))) for v, sj in zip(y, s))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_shell_sample_count_formula():
    # sign patterns x simplex lattice, minus zero-coordinate duplicates
    s = (Fraction(1, 4), Fraction(1, 2))
    pts = shell_unit_samples(s, 2)
    # compositions of 2 into 2 parts: (2,0),(1,1),(0,2) -> 2 + 4 + 2 points
    assert len(pts) == 8


def test_scan_plan_validation():
    ph = build_phase(SingularityType.parse("A2"))
    amp = make_amplitude("fixed_bump")
    with pytest.raises(ValueError):
        ScanPlan(ph, amp, (0.5, 0.25, 0.125, 0.0625))  # too few
    with pytest.raises(ValueError):
        ScanPlan(ph, amp, (0.25, 0.5, 0.125, 0.0625, 0.03125))  # not decreasing
    with pytest.raises(ValueError):
        ScanPlan(ph, amp, geometric_grid(0.25, 0.001, 5), x_strategy="bogus")


def test_scan_includes_origin_and_dominates_it():
    ph = build_phase(SingularityType.parse("A2"))
    amp = make_amplitude("fixed_bump")
    grid = geometric_grid(2.0**-5, 2.0**-9, 5)
    plan = ScanPlan(ph, amp, grid, x_strategy="omega_shells",
                    shell_lambda_count=4, points_per_shell=1, rel_tol=1e-6)
    result = supnorm_scan(plan)
    for h in grid:
        origin_rows = [r for r in result.rows if r.h == h and r.y_index == -1]
        assert len(origin_rows) == 1
        sup = next(s for s in result.sup_rows if s.h == h)
        assert sup.sup_abs >= origin_rows[0].abs_value


def test_full_grid_strategy_candidates():
    ph = build_phase(SingularityType.parse("A2"))
    amp = make_amplitude("fixed_bump")
    grid = geometric_grid(2.0**-4, 2.0**-8, 5)
    plan = ScanPlan(ph, amp, grid, x_strategy="full_grid", points_per_shell=2)
    result = supnorm_scan(plan)
    # uniform (2P+1)-point lattice on [-1, 1] per axis, origin deduplicated
    per_h = [r for r in result.rows if r.h == grid[0]]
    assert len(per_h) == 5
    assert sorted(r.x[0] for r in per_h) == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_a1_projectable_scan_is_bounded():
    ph = build_phase(SingularityType.parse("A1"))
    grid = geometric_grid(2.0**-5, 2.0**-12, 6)
    for delta in (0.3, 1.0):
        amp = make_amplitude("narrow_bump", delta)
        result = supnorm_scan(ScanPlan(ph, amp, grid, rel_tol=1e-7))
        for row in result.sup_rows:
            assert row.sup_abs <= 1.2 * math.sqrt(math.pi)


def test_zero_amplitude_scan():
    ph = build_phase(SingularityType.parse("A2"))
    zero = make_amplitude("custom", 0.0, evaluator=lambda u, h: np.zeros_like(u))
    result = supnorm_scan(ScanPlan(ph, zero, geometric_grid(0.25, 0.01, 5)))
    assert all(r.sup_abs == 0.0 for r in result.sup_rows)


def test_scale_invariance_on_shell_point():
    # |I(lam^{1-s} y; h)| agrees with the rescaled evaluation at h/lam
    ph = build_phase(SingularityType.parse("A3"))
    amp = make_amplitude("fixed_bump")
    h, lam = 2.0**-8, 0.1
    s = [float(v) for v in ph.homogeneity.s]
    y = (-0.8, 0.35)
    x = tuple(lam ** (1.0 - sj) * yj for sj, yj in zip(s, y))
    spec = IntegralSpec(ph, amp, x, h, rel_tol=1e-7)
    direct = evaluate(spec)
    rescaled = evaluate_rescaled(spec, lam)
    assert abs(direct.value - rescaled.value) <= 4 * spec.rel_tol * abs(direct.value)


def test_fit_stability_drop_largest_h():
    # acceptance-style fixture: removing the coarsest row moves the slope
    # by less than tolerance/2
    ph = build_phase(SingularityType.parse("A2"))
    amp = make_amplitude("fixed_bump")
    grid = geometric_grid(2.0**-6, 2.0**-14, 10)
    rows = supnorm_scan(ScanPlan(ph, amp, grid, rel_tol=1e-6)).sup_rows
    tol = 0.03
    full = fit_exponent(rows, caustic_order(ph.singularity), tol)
    trimmed = fit_exponent(rows[1:], caustic_order(ph.singularity), tol)
    assert abs(full.slope - trimmed.slope) < tol / 2


def test_threshold_sweep_flags_exploratory():
    t = SingularityType.parse("A2")
    grid = geometric_grid(2.0**-5, 2.0**-10, 5)
    entries = threshold_sweep(t, [0.2, 1.0 / 3.0, 0.8], grid, tolerance=0.05)
    assert [e.exploratory for e in entries] == [False, False, True]
    # at-threshold delta counts as in-scope (inclusive interval)
    assert entries[1].fit.verdict == "pass"


def test_sweep_beyond_threshold_changes_law():
    # past the threshold the narrow bump stops oscillating against the cubic
    # phase (support h^0.8 is far inside the h^{1/3} Airy scale), so |I(0)|
    # decays like 3 h^{0.3} instead of growing like h^{-1/6}: the h^{-kappa}
    # law visibly breaks, which is exactly why these entries are exploratory.
    t = SingularityType.parse("A2")
    grid = geometric_grid(2.0**-6, 2.0**-12, 6)
    entries = threshold_sweep(t, [0.1, 0.8], grid, tolerance=0.05)
    assert entries[0].fit.slope == pytest.approx(1.0 / 6.0, abs=0.05)
    assert entries[1].fit.slope == pytest.approx(-0.3, abs=0.05)
