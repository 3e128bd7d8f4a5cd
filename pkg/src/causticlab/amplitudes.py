"""delta-dependent amplitude families and symbol-class checkers.

Families a(theta; h) in the class S^k_delta satisfy
|d^alpha a| <= C_alpha h^{-k - delta*|alpha|}.  The built-in kinds:

    fixed_bump            chi(theta - c)                         order 0
    narrow_bump           chi((theta - c)/h^delta)                order 0
    gaussian              h^{-delta/2} exp(-theta^2/h^{2 delta})  order delta/2
    modulated_bump        h^{-p} chi(theta/h^w) e^{i c theta^3/h}
    fold_saturator_below  narrow_bump (paired with the fold phase x*t + t^3)
    fold_saturator_above  h^{(delta-3)/4} chi(theta/h^{(1-delta)/2}) e^{i theta^3/3h}
    custom                caller-supplied evaluator

chi is a fixed smooth bump equal to 1 on (-1, 1) and supported in (-2, 2),
built from the standard exp(-1/t) smoothstep.  The gaussian kind carries a
chi(theta/2) truncation so every built-in is supported in |theta| <= 4; the
truncation sits where the gaussian is below exp(-4/h^{2 delta}) and cannot
affect fitted orders.

``check_symbol_order`` estimates sup|d^alpha a| by 4th-order central
differences on a grid tied to the amplitude's own scale h^delta and fits the
growth exponent against log(1/h).  ``check_delta_regularity_torus`` evaluates
the lattice-coefficient moments sum([h^delta |alpha - omega/h|]^N |a_alpha|^2)
that quantify concentration of a torus Fourier series at rate delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .polys import ThetaPoly

KINDS = (
    "fixed_bump",
    "narrow_bump",
    "gaussian",
    "modulated_bump",
    "fold_saturator_below",
    "fold_saturator_above",
    "custom",
)


def _transition(t: np.ndarray) -> np.ndarray:
    """Smoothstep: 0 for t <= 0, 1 for t >= 1, C-infinity in between."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        g0 = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        g1 = np.where(1.0 - t > 0.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return g0 / (g0 + g1)


def bump(u) -> np.ndarray:
    """chi: 1 on |u| <= 1, 0 on |u| >= 2, smooth in between."""
    u = np.asarray(u, dtype=float)
    return _transition(2.0 - np.abs(u))


def bump_prime(u) -> np.ndarray:
    """Analytic chi' (oracle for the finite-difference pipeline)."""
    u = np.asarray(u, dtype=float)
    t = 2.0 - np.abs(u)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        g0 = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        g1 = np.where(1.0 - t > 0.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
        d0 = np.where(t > 0.0, g0 / np.maximum(t, 1e-300) ** 2, 0.0)
        d1 = np.where(1.0 - t > 0.0, -g1 / np.maximum(1.0 - t, 1e-300) ** 2, 0.0)
    denom = (g0 + g1) ** 2
    ds = np.where(denom > 0.0, (d0 * g1 - g0 * d1) / np.maximum(denom, 1e-300), 0.0)
    return -np.sign(u) * ds


_BUMP_L2_SQ: float | None = None


def bump_l2_norm() -> float:
    """||chi||_{L^2(R)}, cached from a fine fixed grid."""
    global _BUMP_L2_SQ
    if _BUMP_L2_SQ is None:
        u = np.linspace(-2.0, 2.0, 200001)
        _BUMP_L2_SQ = float(np.trapezoid(bump(u) ** 2, u))
    return math.sqrt(_BUMP_L2_SQ)


@dataclass(frozen=True)
class AmplitudeProfile:
    """One h-indexed amplitude family; evaluators are pure and reusable.

    ``axis_slow`` is the amplitude without its oscillatory modulation factor;
    the modulation exponent (cubic_modulation * theta^3, to be divided by h)
    is exposed separately so the quadrature engine can fold it into the phase
    exactly instead of chasing an oscillating integrand.
    """

    kind: str
    delta: float
    declared_order: float
    center: tuple[float, ...] = (0.0,)
    width_exponent: float = 0.0
    dim: int = 1
    prefactor_exponent: float = 0.0
    cubic_modulation: float = 0.0
    support_const: float = 2.0
    evaluator: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown amplitude kind {self.kind!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if self.dim not in (1, 2):
            raise ValueError("only 1D and 2D (tensor) amplitudes are supported")
        if len(self.center) != self.dim:
            raise ValueError("center must have one entry per dimension")
        if self.kind == "custom" and self.evaluator is None:
            raise ValueError("custom amplitudes need an evaluator")

    def support_radius(self, h: float) -> float:
        """Half-width of the support along each axis (h-uniformly <= 4)."""
        return self.support_const * float(h) ** self.width_exponent

    def axis_slow(self, u, h: float, axis: int = 0) -> np.ndarray:
        """Slow (modulation-free) factor along one axis; complex for custom kinds."""
        u = np.asarray(u, dtype=float)
        h = float(h)
        c = self.center[axis]
        if self.kind == "custom":
            return np.asarray(self.evaluator(u, h))
        scale = h**self.width_exponent
        if self.kind == "gaussian":
            core = h**-self.prefactor_exponent * np.exp(-((u - c) / scale) ** 2)
            return core * bump((u - c) / 2.0)
        vals = bump((u - c) / scale)
        if self.prefactor_exponent:
            vals = h**-self.prefactor_exponent * vals
        return vals

    def value(self, theta, h: float):
        """Full amplitude (modulation included) at 1D points or 2D tuples."""
        h = float(h)
        if self.dim == 1:
            u = np.asarray(theta, dtype=float)
            out = self.axis_slow(u, h).astype(complex)
            if self.cubic_modulation:
                out = out * np.exp(1j * self.cubic_modulation * u**3 / h)
            return out
        t1, t2 = theta
        out = self.axis_slow(np.asarray(t1), h, 0).astype(complex) * \
            self.axis_slow(np.asarray(t2), h, 1).astype(complex)
        if self.cubic_modulation:
            mod = self.cubic_modulation * (np.asarray(t1) ** 3 + np.asarray(t2) ** 3)
            out = out * np.exp(1j * mod / h)
        return out

    def modulation_poly(self) -> ThetaPoly | None:
        """Phase-side modulation exponent as a polynomial (to be divided by h)."""
        if not self.cubic_modulation:
            return None
        if self.dim == 1:
            return ThetaPoly.from_terms(1, [(self.cubic_modulation, (3,))])
        return ThetaPoly.from_terms(
            2, [(self.cubic_modulation, (3, 0)), (self.cubic_modulation, (0, 3))])

    def l2_theta(self, h: float) -> float:
        """||a||_{L^2} in theta (1D), modulation dropped since |e^{i phi}| = 1."""
        if self.dim != 1:
            raise ValueError("l2_theta is defined for 1D profiles")
        r = self.support_radius(h)
        c = self.center[0]
        u = np.linspace(c - r, c + r, 40001)
        vals = np.abs(self.axis_slow(u, h)) ** 2
        return math.sqrt(float(np.trapezoid(vals, u)))


def make_amplitude(kind: str, delta: float = 0.0, *, center=0.0, dim: int = 1,
                   width_exponent: float | None = None,
                   prefactor_exponent: float | None = None,
                   cubic_modulation: float | None = None,
                   declared_order: float | None = None,
                   support_const: float | None = None,
                   evaluator: Callable | None = None) -> AmplitudeProfile:
    """Build one of the named amplitude families.

    Unspecified parameters take the family's defining values; the fold
    saturators in particular are fully determined by delta.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown amplitude kind {kind!r}")
    if not 0.0 <= float(delta) <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    ctr = tuple(center) if isinstance(center, (tuple, list)) else (float(center),) * dim

    if kind == "fixed_bump":
        w, p, c3, order, sc = 0.0, 0.0, 0.0, 0.0, 2.0
    elif kind in ("narrow_bump", "fold_saturator_below"):
        w, p, c3, order, sc = float(delta), 0.0, 0.0, 0.0, 2.0
    elif kind == "gaussian":
        w, p, c3, order, sc = float(delta), float(delta) / 2.0, 0.0, float(delta) / 2.0, 4.0
    elif kind == "fold_saturator_above":
        w = (1.0 - float(delta)) / 2.0
        p = (3.0 - float(delta)) / 4.0
        c3, order, sc = 1.0 / 3.0, (3.0 - float(delta)) / 4.0, 2.0
    elif kind == "modulated_bump":
        w = float(width_exponent if width_exponent is not None else delta)
        p = float(prefactor_exponent or 0.0)
        c3 = float(cubic_modulation or 0.0)
        order, sc = p, 2.0
    else:
        w = float(width_exponent or 0.0)
        p = float(prefactor_exponent or 0.0)
        c3 = float(cubic_modulation or 0.0)
        order = float(declared_order or 0.0)
        sc = float(support_const if support_const is not None else 2.0)

    if width_exponent is not None and kind not in ("modulated_bump", "custom"):
        w = float(width_exponent)
    if declared_order is not None:
        order = float(declared_order)
    if support_const is not None:
        sc = float(support_const)

    return AmplitudeProfile(
        kind=kind, delta=float(delta), declared_order=order, center=ctr,
        width_exponent=w, dim=dim, prefactor_exponent=p, cubic_modulation=c3,
        support_const=sc, evaluator=evaluator)


# 4th-order-accurate central difference stencils, offsets symmetric about 0.
_STENCILS = {
    0: (np.array([0]), np.array([1.0])),
    1: (np.arange(-2, 3), np.array([1, -8, 0, 8, -1]) / 12.0),
    2: (np.arange(-2, 3), np.array([-1, 16, -30, 16, -1]) / 12.0),
    3: (np.arange(-3, 4), np.array([1, -8, 13, 0, -13, 8, -1]) / 8.0),
    4: (np.arange(-3, 4), np.array([-1, 12, -39, 56, -39, 12, -1]) / 6.0),
}


def estimate_sup_derivative(profile: AmplitudeProfile, alpha: int, h: float,
                            points_per_scale: int = 64) -> float:
    """sup over theta of |d^alpha a(theta; h)| by central finite differences."""
    if profile.dim != 1:
        raise ValueError("symbol checking is 1D")
    if alpha not in _STENCILS:
        raise ValueError("alpha must be between 0 and 4")
    h = float(h)
    scale = min(1.0, h**profile.delta) if profile.delta > 0 else 1.0
    scale = min(scale, h**profile.width_exponent) if profile.width_exponent else scale
    step = scale / points_per_scale
    r = profile.support_radius(h) + 8 * step
    c = profile.center[0]
    offs, coefs = _STENCILS[alpha]
    grid = np.arange(c - r, c + r + step, step)
    vals = profile.value(grid, h)
    if alpha == 0:
        return float(np.max(np.abs(vals)))
    acc = np.zeros(grid.size - (offs.size - 1), dtype=complex)
    for o, w in zip(offs, coefs):
        acc += w * vals[o - offs[0]: grid.size + o - offs[-1]]
    return float(np.max(np.abs(acc)) / step**alpha)


@dataclass(frozen=True)
class SymbolOrderRow:
    alpha: int
    fitted_order: float
    expected_order: float
    residual: float
    n_points: int


def check_symbol_order(profile: AmplitudeProfile, h_grid, alpha_max: int = 3,
                       points_per_scale: int = 64) -> list[SymbolOrderRow]:
    """Fit sup|d^alpha a| ~ h^{-order} for each alpha and compare to the class.

    The expected order for |alpha| = a is declared_order + delta*a.  Requires a
    geometric h-grid with at least 6 points; raises on degenerate fits.
    """
    hs = np.asarray(sorted(h_grid, reverse=True), dtype=float)
    if hs.size < 6:
        raise ValueError("need at least 6 h values")
    if alpha_max > 4:
        raise ValueError("alpha_max is limited to 4")
    rows = []
    logs_inv_h = np.log(1.0 / hs)
    for alpha in range(alpha_max + 1):
        sups = np.array([estimate_sup_derivative(profile, alpha, h, points_per_scale)
                         for h in hs])
        usable = sups > 0
        if np.count_nonzero(usable) < 3:
            raise ValueError(f"degenerate fit at alpha={alpha}: "
                             f"{np.count_nonzero(usable)} usable points")
        slope, intercept = np.polyfit(logs_inv_h[usable], np.log(sups[usable]), 1)
        resid = float(np.max(np.abs(
            np.log(sups[usable]) - (slope * logs_inv_h[usable] + intercept))))
        expected = profile.declared_order + profile.delta * alpha
        rows.append(SymbolOrderRow(alpha, float(slope), float(expected), resid,
                                   int(np.count_nonzero(usable))))
    return rows


def check_delta_regularity_torus(coeffs: dict, h: float, delta: float, omega,
                                 moment_orders=(1, 2, 4, 8)) -> dict[int, float]:
    """Moments sum([h^delta |alpha - omega/h|]^N |a_alpha|^2) of a torus series.

    ``coeffs`` maps integer lattice tuples to complex amplitudes and must be
    l2-normalized (sum |a|^2 = 1 within 1e-10).  Bounded-in-h moments certify
    concentration at rate delta on the frequency shell omega/h.
    """
    pts = np.array(list(coeffs.keys()), dtype=float)
    amps = np.array(list(coeffs.values()), dtype=complex)
    total = float(np.sum(np.abs(amps) ** 2))
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"coefficients are not l2-normalized: sum|a|^2 = {total}")
    omega = np.asarray(omega, dtype=float)
    dist = np.sqrt(np.sum((pts - omega / float(h)) ** 2, axis=1))
    weight = float(h) ** float(delta) * dist
    return {int(n): float(np.sum(weight**n * np.abs(amps) ** 2))
            for n in moment_orders}
