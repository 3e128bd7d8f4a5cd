"""Fold-caustic experiments across the delta = 1/3 regime change.

The sharp sup-norm exponent for a delta-concentrated fold family is

    (1 + 3 delta)/6   for delta in [0, 1/3]
    (1 + delta)/4     for delta in [1/3, 1]

(continuous at 1/3).  Each regime has a saturating family:

    below:  u_h(x) = integral chi(t/h^delta) e^{i(x t + t^3)/h} dt
    above:  u_h(x) = integral a(t) e^{i(x t - t^3/3)/h} dt,
            a(t) = h^{(delta-3)/4} chi(t/h^{(1-delta)/2}) e^{i t^3/3h}

and each family is run with its own displayed phase.  ||u_h||_2 comes from
the coefficient side: the map a -> u is (2 pi h)^{1/2} times an isometry, so
||u_h||_{L^2(R)} = (2 pi h)^{1/2} ||a||_{L^2}; sup|u_h| is scanned over
x = 0 plus shells at the caustic scale h^{2/3}.  Fitting log(sup/||u||_2)
against log(1/h) per delta and locating the best two-segment breakpoint of
the slope-vs-delta curve turns the regime change into one scalar test.

``lemma_62_suite`` cross-checks the two exact integrals behind the
above-threshold estimate (see ``oscint.m_alpha`` and
``oscint.weighted_cauchy``) against adaptive quadrature and fits their
eps-blowup exponents (3/2 and 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .amplitudes import AmplitudeProfile, make_amplitude
from .catalog import HomogeneityProfile, PhaseFunction, SingularityType, build_phase
from .oscint import (DEFAULT_SETTINGS, IntegralSpec, QuadSettings, evaluate,
                     m_alpha, weighted_cauchy)
from .polys import ThetaPoly
from .scaling import ExponentFit, SCAN_BUDGET, fit_exponent, SupRow, geometric_grid

DEFAULT_FOLD_H_GRID = geometric_grid(2.0**-8, 2.0**-18, 11)


def sharp_exponent(delta):
    """Piecewise-sharp growth exponent of sup|u|/||u||_2 for the fold."""
    d = Fraction(delta) if isinstance(delta, (Fraction, int)) else float(delta)
    if not 0 <= float(d) <= 1:
        raise ValueError("delta must lie in [0, 1]")
    if isinstance(d, Fraction):
        return (1 + 3 * d) / 6 if d <= Fraction(1, 3) else (1 + d) / 4
    return (1.0 + 3.0 * d) / 6.0 if d <= 1.0 / 3.0 else (1.0 + d) / 4.0


def _below_phase() -> PhaseFunction:
    # the fold normal form itself: x*t + t^3
    return build_phase(SingularityType.parse("A2"))


def _above_phase() -> PhaseFunction:
    # the Airy-convention fold phase x*t - t^3/3 (same homogeneity weights)
    a2 = SingularityType.parse("A2")
    hom = HomogeneityProfile((Fraction(1, 3),), (Fraction(1, 3),))
    f = ThetaPoly.from_terms(1, [(-1.0 / 3.0, (3,))])
    fj = (ThetaPoly.from_terms(1, [(1.0, (1,))]),)
    return PhaseFunction(a2, hom, f, fj)


@dataclass(frozen=True)
class FoldExperiment:
    delta: float
    side: str  # below | above | at_threshold
    h_grid: tuple[float, ...] = DEFAULT_FOLD_H_GRID
    x_window: float = 2.0
    x_points: int = 4
    rel_tol: float = 1e-7
    tolerance: float = 0.04
    eval_budget: int | None = None
    settings: QuadSettings = field(default=DEFAULT_SETTINGS, compare=False)

    def __post_init__(self):
        if self.side not in ("below", "above", "at_threshold"):
            raise ValueError(f"unknown side {self.side!r}")
        third = 1.0 / 3.0
        if self.side == "below" and self.delta > third + 1e-9:
            raise ValueError("below-side experiments need delta <= 1/3")
        if self.side == "above" and self.delta < third - 1e-9:
            raise ValueError("above-side experiments need delta >= 1/3")
        if self.side == "at_threshold" and abs(self.delta - third) > 1e-9:
            raise ValueError("at_threshold means delta = 1/3")

    @property
    def amplitude(self) -> AmplitudeProfile:
        kind = "fold_saturator_below" if self.side in ("below", "at_threshold") \
            else "fold_saturator_above"
        return make_amplitude(kind, self.delta)

    @property
    def phase(self) -> PhaseFunction:
        return _below_phase() if self.side in ("below", "at_threshold") \
            else _above_phase()


@dataclass(frozen=True)
class FoldRow:
    delta: float
    h: float
    sup_abs: float
    l2: float
    ratio: float
    converged: bool


@dataclass(frozen=True)
class FoldRun:
    experiment: FoldExperiment
    rows: tuple[FoldRow, ...]
    fit: ExponentFit


def l2_from_coefficients(exp: FoldExperiment, h: float) -> float:
    """||u_h||_{L^2(R)} = (2 pi h)^{1/2} ||a||_{L^2(theta)} (Fourier-side)."""
    return math.sqrt(2.0 * math.pi * h) * exp.amplitude.l2_theta(h)


def _x_offsets(exp: FoldExperiment, h: float) -> list[float]:
    scale = exp.x_window * h ** (2.0 / 3.0)
    fracs = [(i + 1) / exp.x_points for i in range(exp.x_points)]
    return [0.0] + [s * f * scale for f in fracs for s in (+1.0, -1.0)]


def run_fold(exp: FoldExperiment) -> FoldRun:
    """sup/L2 ratio per h and its exponent fit against sharp_exponent(delta)."""
    budget = exp.eval_budget if exp.eval_budget is not None else SCAN_BUDGET[1]
    phase, amp = exp.phase, exp.amplitude
    rows = []
    for h in exp.h_grid:
        best, conv = 0.0, True
        for x in _x_offsets(exp, h):
            res = evaluate(IntegralSpec(
                phase, amp, (x,), h, rel_tol=exp.rel_tol,
                includes_prefactor=False, budget=budget, settings=exp.settings))
            best = max(best, res.abs_value)
            conv = conv and res.converged
        l2 = l2_from_coefficients(exp, h)
        rows.append(FoldRow(exp.delta, h, best, l2, best / l2, conv))
    ref = sharp_exponent(Fraction(exp.delta).limit_denominator(10**6))
    sup_rows = [SupRow(r.h, r.ratio, (0.0,), r.converged) for r in rows]
    fit = fit_exponent(sup_rows, ref, exp.tolerance)
    return FoldRun(exp, tuple(rows), fit)


def two_segment_breakpoint(deltas, slopes, grid_step: float = 0.01,
                           lo: float = 0.05, hi: float = 0.95):
    """Continuous two-piece linear fit; returns (breakpoint, sse).

    The hinge model slope(d) = c0 + c1 d + c2 max(d - t, 0) is linear for each
    candidate t on the 0.01 grid; the best t minimizes the residual.
    """
    d = np.asarray(deltas, dtype=float)
    y = np.asarray(slopes, dtype=float)
    best_t, best_sse = math.nan, math.inf
    for t in np.arange(lo, hi + grid_step / 2, grid_step):
        design = np.stack([np.ones_like(d), d, np.maximum(d - t, 0.0)], axis=1)
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        sse = float(np.sum((design @ coef - y) ** 2))
        if sse < best_sse - 1e-15:
            best_sse, best_t = sse, float(t)
    return best_t, best_sse


@dataclass(frozen=True)
class FoldCurve:
    runs: tuple[FoldRun, ...]
    breakpoint: float
    breakpoint_sse: float

    @property
    def max_slope_error(self) -> float:
        return max(abs(r.fit.slope - float(r.fit.reference)) for r in self.runs)


def fold_curve(deltas, h_grid=DEFAULT_FOLD_H_GRID, *, x_window: float = 2.0,
               rel_tol: float = 1e-7, tolerance: float = 0.04,
               eval_budget: int | None = None,
               settings: QuadSettings = DEFAULT_SETTINGS) -> FoldCurve:
    """Fit the exponent at each delta (below-family through 1/3, above after)."""
    runs = []
    for d in deltas:
        d = float(d)
        side = "below" if d <= 1.0 / 3.0 + 1e-12 else "above"
        exp = FoldExperiment(d, side, tuple(h_grid), x_window=x_window,
                             rel_tol=rel_tol, tolerance=tolerance,
                             eval_budget=eval_budget, settings=settings)
        runs.append(run_fold(exp))
    bp, sse = two_segment_breakpoint(
        [r.experiment.delta for r in runs], [r.fit.slope for r in runs])
    return FoldCurve(tuple(runs), bp, sse)


@dataclass(frozen=True)
class Lemma62Row:
    name: str
    x: float
    eps: float
    numeric: float
    closed_form: float
    rel_error: float


@dataclass(frozen=True)
class Lemma62Report:
    rows: tuple[Lemma62Row, ...]
    exponent_first: float
    exponent_second: float
    max_rel_error: float


def _quad_first(x: float, eps: float) -> float:
    f = lambda t: 1.0 / ((x - t * t) ** 2 + eps * eps)
    cut = 2.0 * max(1.0, math.sqrt(abs(x)) + 1.0)
    pts = [-math.sqrt(x), math.sqrt(x)] if x > 0 else None
    mid, _ = quad(f, -cut, cut, points=pts, limit=400, epsabs=0.0, epsrel=1e-10)
    left, _ = quad(f, -np.inf, -cut, limit=200, epsabs=1e-14, epsrel=1e-10)
    right, _ = quad(f, cut, np.inf, limit=200, epsabs=1e-14, epsrel=1e-10)
    return mid + left + right


def _quad_second(x: float, eps: float) -> float:
    # substitute u = t^2: integral du / ((x-u)^2 + eps^2) over [0, inf)
    f = lambda u: 1.0 / ((x - u) ** 2 + eps * eps)
    cut = 2.0 * max(1.0, abs(x) + 1.0)
    pts = [x] if 0 < x < cut else None
    mid, _ = quad(f, 0.0, cut, points=pts, limit=400, epsabs=0.0, epsrel=1e-10)
    tail, _ = quad(f, cut, np.inf, limit=200, epsabs=1e-14, epsrel=1e-10)
    return mid + tail


def lemma_62_suite(eps_grid, x_grid) -> Lemma62Report:
    """Adaptive quadrature vs closed forms, plus eps-blowup exponents of the sups."""
    rows = []
    sup1, sup2 = [], []
    for eps in eps_grid:
        vals1, vals2 = [], []
        for x in x_grid:
            n1 = _quad_first(float(x), float(eps))
            c1 = eps ** -1.5 * m_alpha(-x / eps)
            rows.append(Lemma62Row("resolvent_square", float(x), float(eps), n1, c1,
                                   abs(n1 - c1) / abs(c1)))
            n2 = _quad_second(float(x), float(eps))
            c2 = weighted_cauchy(float(x), float(eps))
            rows.append(Lemma62Row("weighted_cauchy", float(x), float(eps), n2, c2,
                                   abs(n2 - c2) / abs(c2)))
            vals1.append(n1)
            vals2.append(n2)
        sup1.append(max(vals1))
        sup2.append(max(vals2))
    loge = np.log([1.0 / float(e) for e in eps_grid])
    e1 = float(np.polyfit(loge, np.log(sup1), 1)[0])
    e2 = float(np.polyfit(loge, np.log(sup2), 1)[0])
    return Lemma62Report(tuple(rows), e1, e2,
                         max(r.rel_error for r in rows))
