"""Sup-norm scans over (x, h) grids and scaling-exponent fits.

A scan evaluates |I(x; h)| at x = 0 and (optionally) on quasi-homogeneous
shells: for each lambda in a geometric ladder within [h, 1], points
x_j = lambda^{1-s_j} y_j with y on the unit shell

    boundary of Omega(1) = { sum_j |y_j|^{1/(1-s_j)} = 1 },

sampled by sign patterns times a fixed simplex grid in the |y_j|^{1/(1-s_j)}
coordinates.  The fitted exponent of log(sup |I|) against log(1/h) is then
compared with a reference rational (the caustic order, or a regime formula)
to produce a pass/fail/inconclusive verdict.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .amplitudes import AmplitudeProfile, make_amplitude
from .catalog import PhaseFunction, SingularityType, build_phase, caustic_order, threshold
from .oscint import DEFAULT_SETTINGS, IntegralSpec, QuadSettings, evaluate

SCAN_BUDGET = {1: 2**24, 2: 2**30}


def geometric_grid(start: float, stop: float, points: int) -> tuple[float, ...]:
    """Strictly decreasing geometric h-grid from start down to stop."""
    if not 0 < stop < start < 1:
        raise ValueError("need 0 < stop < start < 1")
    return tuple(float(v) for v in np.geomspace(start, stop, points))


@dataclass(frozen=True)
class ScanPlan:
    phase: PhaseFunction
    amplitude: AmplitudeProfile
    h_grid: tuple[float, ...]
    x_strategy: str = "origin_only"  # origin_only | omega_shells | full_grid
    shell_lambda_count: int = 8
    points_per_shell: int = 1
    rel_tol: float = 1e-6
    eval_budget: int | None = None
    seed: int = 0
    random_shell_points: int = 0
    workers: int = 1
    settings: QuadSettings = field(default=DEFAULT_SETTINGS, compare=False)

    def __post_init__(self):
        hs = self.h_grid
        if len(hs) < 5 or any(hs[i + 1] >= hs[i] for i in range(len(hs) - 1)):
            raise ValueError("h_grid must be strictly decreasing with >= 5 points")
        if self.points_per_shell < 1:
            raise ValueError("points_per_shell must be >= 1")
        if self.x_strategy not in ("origin_only", "omega_shells", "full_grid"):
            raise ValueError(f"unknown x_strategy {self.x_strategy!r}")


@dataclass(frozen=True)
class ScanRow:
    h: float
    lam: float
    y_index: int
    x: tuple[float, ...]
    abs_value: float
    est_error: float
    converged: bool


@dataclass(frozen=True)
class SupRow:
    h: float
    sup_abs: float
    argmax_x: tuple[float, ...]
    all_converged: bool


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    sup_rows: tuple[SupRow, ...]


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    reference: Fraction
    tolerance: float
    verdict: str  # pass | fail | inconclusive
    n_rows: int


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def shell_unit_samples(s_weights, points_per_shell: int, seed: int = 0,
                       random_points: int = 0) -> list[tuple[float, ...]]:
    """Deterministic sample of the unit shell in the |y_j|^{1/(1-s_j)} coordinates.

    Sign patterns times the lattice simplex {n/P : sum n = P} give
    2^{k0} * binom(P+k0-1, k0-1) points before deduplication of zero
    coordinates.  ``random_points`` extra Dirichlet samples (seeded) can be
    appended; the default of zero keeps scans seed-independent.
    """
    s = [float(v) for v in s_weights]
    k0 = len(s)
    if k0 == 0:
        return [()]
    us = [tuple(n / points_per_shell for n in comp)
          for comp in _compositions(points_per_shell, k0)]
    if random_points:
        rng = np.random.default_rng(seed)
        extra = rng.dirichlet(np.ones(k0), size=random_points)
        us.extend(tuple(float(v) for v in row) for row in extra)
    pts: set[tuple[float, ...]] = set()
    for u in us:
        for signs in range(2**k0):
            y = tuple(
                (1.0 if (signs >> j) & 1 == 0 else -1.0) * u[j] ** (1.0 - s[j])
                for j in range(k0))
            pts.add(y)
    return sorted(pts)


def _candidate_points(plan: ScanPlan, h: float) -> list[tuple[float, tuple[float, ...], int]]:
    """(lambda, x, y_index) candidates for one h; origin always included."""
    k0 = plan.phase.k0
    origin = (0.0,) * k0
    points = [(0.0, origin, -1)]
    if plan.x_strategy == "origin_only" or k0 == 0:
        return points
    s = [float(v) for v in plan.phase.homogeneity.s]
    if plan.x_strategy == "full_grid":
        axes = np.linspace(-1.0, 1.0, 2 * plan.points_per_shell + 1)
        grids = np.meshgrid(*([axes] * k0), indexing="ij")
        for idx, x in enumerate(zip(*(g.ravel() for g in grids))):
            if any(v != 0.0 for v in x):
                points.append((1.0, tuple(float(v) for v in x), idx))
        return points
    ys = shell_unit_samples(plan.phase.homogeneity.s, plan.points_per_shell,
                            plan.seed, plan.random_shell_points)
    lams = np.geomspace(h, 1.0, plan.shell_lambda_count)
    for lam in lams:
        for idx, y in enumerate(ys):
            x = tuple(float(lam) ** (1.0 - sj) * yj for sj, yj in zip(s, y))
            points.append((float(lam), x, idx))
    return points


def _eval_spec(spec: IntegralSpec):
    return evaluate(spec)


def _pmap(func, items, workers: int):
    if workers <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


def supnorm_scan(plan: ScanPlan) -> ScanResult:
    """Evaluate |I| on the plan's candidate set and record the sup per h."""
    budget = plan.eval_budget if plan.eval_budget is not None \
        else SCAN_BUDGET[plan.phase.k]
    tasks: list[IntegralSpec] = []
    meta: list[tuple[float, float, int, tuple[float, ...]]] = []
    for h in plan.h_grid:
        for lam, x, y_idx in _candidate_points(plan, h):
            tasks.append(IntegralSpec(
                plan.phase, plan.amplitude, x, h, rel_tol=plan.rel_tol,
                includes_prefactor=True, budget=budget, settings=plan.settings))
            meta.append((h, lam, y_idx, x))
    results = _pmap(_eval_spec, tasks, plan.workers)
    rows = tuple(
        ScanRow(h, lam, y_idx, x, res.abs_value, res.est_error, res.converged)
        for (h, lam, y_idx, x), res in zip(meta, results))
    sup_rows = []
    for h in plan.h_grid:
        here = [r for r in rows if r.h == h]
        best = max(here, key=lambda r: r.abs_value)
        sup_rows.append(SupRow(h, best.abs_value, best.x,
                               all(r.converged for r in here)))
    return ScanResult(rows, tuple(sup_rows))


def fit_exponent(sup_rows, reference: Fraction, tolerance: float) -> ExponentFit:
    """Least-squares slope of log(sup) vs log(1/h), with a verdict.

    pass: |slope - reference| <= tolerance and r^2 >= 0.98;
    fail: r^2 >= 0.98 but the slope misses; inconclusive otherwise (including
    fewer than 4 converged rows).  Near-constant data (a zero reference) makes
    r^2 meaningless; property-style checks should be used there instead.
    """
    usable = [(r.h, r.sup_abs) for r in sup_rows
              if r.all_converged and r.sup_abs > 0.0]
    ref = Fraction(reference)
    if len(usable) < 4:
        return ExponentFit(math.nan, math.nan, math.nan, ref, tolerance,
                           "inconclusive", len(usable))
    logs = np.log([1.0 / h for h, _ in usable])
    vals = np.log([v for _, v in usable])
    slope, intercept = np.polyfit(logs, vals, 1)
    pred = slope * logs + intercept
    ss_res = float(np.sum((vals - pred) ** 2))
    ss_tot = float(np.sum((vals - np.mean(vals)) ** 2))
    if ss_tot <= 1e-24:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    if r2 < 0.98:
        verdict = "inconclusive"
    elif abs(slope - float(ref)) <= tolerance:
        verdict = "pass"
    else:
        verdict = "fail"
    return ExponentFit(float(slope), float(intercept), float(r2), ref,
                       tolerance, verdict, len(usable))


@dataclass(frozen=True)
class SweepEntry:
    delta: float
    fit: ExponentFit
    exploratory: bool


def threshold_sweep(t: SingularityType, deltas, h_grid, *,
                    tolerance: float = 0.05, rel_tol: float = 1e-6,
                    x_strategy: str = "origin_only", points_per_shell: int = 1,
                    eval_budget: int | None = None, workers: int = 1,
                    settings: QuadSettings = DEFAULT_SETTINGS) -> list[SweepEntry]:
    """Scan one type across delta values with matching narrow-bump amplitudes.

    Below (and at) the type's threshold the fit is compared against the
    caustic order; beyond it the entry is flagged exploratory and its verdict
    carries no expectation.
    """
    phase = build_phase(t)
    ref = caustic_order(t)
    thr = float(threshold(t))
    out = []
    for d in deltas:
        amp = make_amplitude("narrow_bump", float(d), dim=phase.k)
        plan = ScanPlan(phase, amp, tuple(h_grid), x_strategy=x_strategy,
                        points_per_shell=points_per_shell, rel_tol=rel_tol,
                        eval_budget=eval_budget, workers=workers, settings=settings)
        fit = fit_exponent(supnorm_scan(plan).sup_rows, ref, tolerance)
        out.append(SweepEntry(float(d), fit, float(d) > thr + 1e-12))
    return out
