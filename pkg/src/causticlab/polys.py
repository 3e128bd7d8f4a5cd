"""Sparse polynomials in one or two variables.

The phase functions in this project are short sums of monomials
c * t1^a1 * t2^a2, so a tuple-of-terms representation is enough.  What the
quadrature engine needs from a phase, beyond pointwise evaluation, is a cheap
per-axis upper bound on |d(phase)/d(axis)| over a box, which a monomial sum
gives for free: bound each term by |c| * |t|^a_axis * max|other|^a_other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Term = tuple[float, tuple[int, ...]]


def _merge(terms: list[Term]) -> tuple[Term, ...]:
    acc: dict[tuple[int, ...], float] = {}
    for c, e in terms:
        acc[e] = acc.get(e, 0.0) + float(c)
    kept = tuple(sorted((c, e) for e, c in acc.items() if c != 0.0))
    return tuple((c, e) for c, e in kept)


@dataclass(frozen=True)
class ThetaPoly:
    """Polynomial sum(c * theta^e) in ``nvars`` variables, exponents >= 0."""

    nvars: int
    terms: tuple[Term, ...]

    @classmethod
    def from_terms(cls, nvars: int, terms) -> "ThetaPoly":
        clean = []
        for c, e in terms:
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"term exponent {e} does not have {nvars} entries")
            clean.append((float(c), e))
        return cls(nvars, _merge(clean))

    @classmethod
    def zero(cls, nvars: int) -> "ThetaPoly":
        return cls(nvars, ())

    def __add__(self, other: "ThetaPoly") -> "ThetaPoly":
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        return ThetaPoly(self.nvars, _merge(list(self.terms) + list(other.terms)))

    def scale(self, factor: float) -> "ThetaPoly":
        return ThetaPoly(self.nvars, _merge([(factor * c, e) for c, e in self.terms]))

    def substitute_scaled(self, axis_factors) -> "ThetaPoly":
        """Return p(f1*t1, ..., fk*tk) for positive scale factors f."""
        fs = [float(f) for f in axis_factors]
        if len(fs) != self.nvars:
            raise ValueError("need one factor per variable")
        out = []
        for c, e in self.terms:
            scale = 1.0
            for f, a in zip(fs, e):
                scale *= f**a
            out.append((c * scale, e))
        return ThetaPoly(self.nvars, _merge(out))

    def partial(self, axis: int) -> "ThetaPoly":
        out = []
        for c, e in self.terms:
            a = e[axis]
            if a == 0:
                continue
            de = list(e)
            de[axis] = a - 1
            out.append((c * a, tuple(de)))
        return ThetaPoly(self.nvars, _merge(out))

    def is_separable(self) -> bool:
        """True when no term mixes two variables."""
        for _, e in self.terms:
            if sum(1 for a in e if a > 0) > 1:
                return False
        return True

    def axis_part(self, axis: int) -> "ThetaPoly":
        """Univariate restriction of a separable polynomial (constant term kept on axis 0)."""
        out = []
        for c, e in self.terms:
            if all(a == 0 for j, a in enumerate(e) if j != axis):
                if e[axis] > 0 or axis == 0:
                    out.append((c, (e[axis],)))
        return ThetaPoly(1, _merge(out))

    def __call__(self, *coords):
        coords = [np.asarray(c, dtype=float) for c in coords]
        if len(coords) != self.nvars:
            raise ValueError("wrong number of coordinate arrays")
        shape = np.broadcast_shapes(*(x.shape for x in coords))
        total = np.zeros(shape)
        for c, e in self.terms:
            term = np.full(shape, c)
            for x, a in zip(coords, e):
                if a:
                    term = term * x**a
            total += term
        return total

    def eval_outer(self, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        """Evaluate on the tensor grid t1 x t2 (2-variable polynomials only)."""
        if self.nvars != 2:
            raise ValueError("eval_outer needs a 2-variable polynomial")
        out = np.zeros((t1.size, t2.size))
        for c, (a1, a2) in self.terms:
            col = t1**a1 if a1 else np.ones(t1.size)
            row = t2**a2 if a2 else np.ones(t2.size)
            out += c * np.outer(col, row)
        return out

    def abs_bound_profile(self, axis: int, box, t: np.ndarray) -> np.ndarray:
        """Pointwise-in-t upper bound for |p| maximized over the other axes of ``box``.

        ``box`` is a sequence of (lo, hi) per variable; entry ``axis`` is ignored.
        """
        t = np.abs(np.asarray(t, dtype=float))
        out = np.zeros_like(t)
        for c, e in self.terms:
            term = abs(c) * t ** e[axis]
            for j, a in enumerate(e):
                if j == axis or a == 0:
                    continue
                lo, hi = box[j]
                term = term * max(abs(lo), abs(hi)) ** a
            out += term
        return out
