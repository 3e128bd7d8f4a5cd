"""Catalog of stable simple caustic normal forms (A/D/E series).

Each type carries a polynomial normal-form phase

    phi(x, theta) = sum_{j<=k0} x_j * f_j(theta) + f(theta)

on R^{k0} x R^k with the minimal number k of phase variables (1 for the
A series, 2 for D and E; the padding quadratic block in the extra phase
variables is omitted because it only contributes a modulus-one Fresnel
constant after the h^{-k/2} normalization).  Alongside the phase we store the
quasi-homogeneity weights r (phase variables) and s (base variables), so that

    phi(lam^{1-s} x, lam^r theta) = lam * phi(x, theta)   for all lam > 0.

The caustic order is kappa = k/2 - sum(r_j), and each type has a regularity
threshold delta0.  All of r, s, kappa, delta0 are exact ``fractions.Fraction``
values; floats appear only in evaluators.

The subordination DAG records which simpler types appear arbitrarily close to
a given one away from its equisingularity locus.  Note one known wrinkle: for
D4+ the DAG-derived minimum homogeneity is 1/4 (through the edge D4+ -> A3)
while the tabulated threshold is 1/3, reflecting that the A-chain is adjacent
to the minus variant only.  ``threshold`` returns the tabulated value;
``dag_min_homogeneity`` is the separate DAG diagnostic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .polys import ThetaPoly

FAMILIES = ("A", "D", "Dminus", "Dplus", "E")
E_INDICES = (6, 7, 8)


@dataclass(frozen=True)
class SingularityType:
    """Tag for one normal form: family, index m (or 6/7/8 for E), sign variant.

    Index convention: ``index`` is m, so A_{m+1} has index m (A2 <-> m=1) and
    D_{m+1} has index m (D4 <-> m=3).  For the E family the index is 6, 7, 8.
    """

    family: str
    index: int
    sign: int = +1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.family == "A":
            if self.index < 0:
                raise ValueError("A series needs index m >= 0")
        elif self.family in ("D", "Dminus", "Dplus"):
            if self.index < 3:
                raise ValueError("D series needs index m >= 3")
            odd = self.index % 2 == 1
            if self.family == "D" and odd:
                raise ValueError(
                    f"D with odd m={self.index} must be Dplus or Dminus")
            if self.family in ("Dminus", "Dplus") and not odd:
                raise ValueError(
                    f"D{'+' if self.family == 'Dplus' else '-'} needs odd m, got m={self.index}")
            expected = {"Dminus": -1, "Dplus": +1}.get(self.family)
            if expected is not None and self.sign != expected:
                raise ValueError("D-series sign is fixed by the family")
        else:
            if self.index not in E_INDICES:
                raise ValueError("E family index must be 6, 7 or 8")
            if self.index in (7, 8) and self.sign != +1:
                raise ValueError(f"E{self.index} has no sign variant")

    @property
    def label(self) -> str:
        if self.family == "A":
            base = f"A{self.index + 1}"
            return base if self.sign == +1 else base + "-"
        if self.family == "Dminus":
            return f"D{self.index + 1}-"
        if self.family == "Dplus":
            return f"D{self.index + 1}+"
        if self.family == "D":
            base = f"D{self.index + 1}"
            return base if self.sign == +1 else base + "-flip"
        base = f"E{self.index}"
        return base if self.sign == +1 else base + "-"

    @classmethod
    def parse(cls, text: str) -> "SingularityType":
        """Parse labels like 'A2', 'A3-', 'D4+', 'D5', 'E6', 'E6-'."""
        m = re.fullmatch(r"([ADE])(\d+)([+-]?)", text.strip())
        if not m:
            raise ValueError(f"cannot parse singularity label {text!r}")
        fam, num, suffix = m.group(1), int(m.group(2)), m.group(3)
        if fam == "A":
            return cls("A", num - 1, -1 if suffix == "-" else +1)
        if fam == "D":
            idx = num - 1
            if suffix == "+":
                return cls("Dplus", idx, +1)
            if suffix == "-":
                return cls("Dminus", idx, -1)
            return cls("D", idx, +1)
        return cls("E", num, -1 if suffix == "-" else +1)

    def canonical(self) -> "SingularityType":
        """Sign-normalized representative (used as DAG node identity)."""
        if self.family in ("A", "D", "E") and self.sign == -1:
            return SingularityType(self.family, self.index, +1)
        return self


@dataclass(frozen=True)
class HomogeneityProfile:
    """Quasi-homogeneity weights: r per phase variable, s per active base variable."""

    r: tuple[Fraction, ...]
    s: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.r)

    @property
    def k0(self) -> int:
        return len(self.s)

    def __post_init__(self):
        if not all(Fraction(0) < rj <= Fraction(1, 2) for rj in self.r):
            raise ValueError("phase weights r_j must lie in (0, 1/2]")
        if not all(Fraction(0) <= sj < Fraction(1) for sj in self.s):
            raise ValueError("base weights s_j must lie in [0, 1)")


@dataclass(frozen=True)
class PhaseFunction:
    """Normal-form phase with evaluators and exact homogeneity data.

    ``f_terms`` is the x-independent part f(theta); ``fj_monomials[j]`` is the
    single monomial f_{j+1}(theta) multiplying x_{j+1}.
    """

    singularity: SingularityType
    homogeneity: HomogeneityProfile
    f_terms: ThetaPoly
    fj_monomials: tuple[ThetaPoly, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.homogeneity.k

    @property
    def k0(self) -> int:
        return self.homogeneity.k0

    def theta_poly(self, x) -> ThetaPoly:
        """Collapse to a polynomial in theta at a fixed base point x."""
        x = tuple(float(v) for v in x)
        if len(x) != self.k0:
            raise ValueError(f"x must have {self.k0} entries, got {len(x)}")
        poly = self.f_terms
        for xj, mono in zip(x, self.fj_monomials):
            if xj != 0.0:
                poly = poly + mono.scale(xj)
        return poly

    def phi(self, x, *theta):
        return self.theta_poly(x)(*theta)

    def grad_theta(self, x, *theta):
        poly = self.theta_poly(x)
        return tuple(poly.partial(axis)(*theta) for axis in range(self.k))

    def grad_x(self, *theta):
        return tuple(mono(*theta) for mono in self.fj_monomials)


def _monomial(k: int, coeff, *exps) -> ThetaPoly:
    return ThetaPoly.from_terms(k, [(coeff, tuple(exps))])


def build_phase(t: SingularityType) -> PhaseFunction:
    """Construct the normal form for ``t`` with minimal phase dimension."""
    if t.family == "A":
        m = t.index
        k = 1
        f = _monomial(k, t.sign, m + 2)
        fjs = tuple(_monomial(k, 1, j) for j in range(1, m + 1))
        r = (Fraction(1, m + 2),)
    elif t.family in ("D", "Dminus", "Dplus"):
        m = t.index
        k = 2
        f = ThetaPoly.from_terms(k, [(1.0, (2, 1)), (float(t.sign), (0, m))])
        fjs = (_monomial(k, 1, 1, 0),) + tuple(
            _monomial(k, 1, 0, j) for j in range(1, m))
        r = (Fraction(1, 2) - Fraction(1, 2 * m), Fraction(1, m))
    elif t.index == 6:
        k = 2
        f = ThetaPoly.from_terms(k, [(1.0, (3, 0)), (float(t.sign), (0, 4))])
        fjs = (
            _monomial(k, 1, 1, 0),
            _monomial(k, 1, 0, 1),
            _monomial(k, 1, 0, 2),
            _monomial(k, 1, 1, 1),
            _monomial(k, 1, 1, 2),
        )
        r = (Fraction(1, 3), Fraction(1, 4))
    elif t.index == 7:
        k = 2
        f = ThetaPoly.from_terms(k, [(1.0, (3, 0)), (1.0, (1, 3))])
        fjs = (
            _monomial(k, 1, 1, 0),
            _monomial(k, 1, 0, 1),
            _monomial(k, 1, 0, 2),
            _monomial(k, 1, 0, 3),
            _monomial(k, 1, 0, 4),
            _monomial(k, 1, 1, 1),
        )
        r = (Fraction(1, 3), Fraction(2, 9))
    else:
        k = 2
        f = ThetaPoly.from_terms(k, [(1.0, (3, 0)), (1.0, (0, 5))])
        fjs = (
            _monomial(k, 1, 1, 0),
            _monomial(k, 1, 0, 1),
            _monomial(k, 1, 0, 2),
            _monomial(k, 1, 0, 3),
            _monomial(k, 1, 1, 1),
            _monomial(k, 1, 1, 2),
            _monomial(k, 1, 1, 3),
        )
        r = (Fraction(1, 3), Fraction(1, 5))

    # s_j is the joint weight of the monomial f_j: sum over axes of exponent*r.
    s = tuple(
        sum((Fraction(a) * rj for a, rj in zip(mono.terms[0][1], r)), Fraction(0))
        for mono in fjs
    )
    return PhaseFunction(t, HomogeneityProfile(r, s), f, fjs)


def caustic_order(t: SingularityType) -> Fraction:
    """Exact caustic order kappa = k/2 - sum(r_j) with minimal k."""
    hom = build_phase(t).homogeneity
    return Fraction(hom.k, 2) - sum(hom.r, Fraction(0))


def threshold(t: SingularityType) -> Fraction:
    """Tabulated regularity threshold delta0 for the h^{-kappa} sup-norm law."""
    m = t.index
    if t.family == "A":
        return Fraction(1) if m == 0 else Fraction(1, m + 2)
    if t.family == "Dplus":
        return Fraction(1, m)
    if t.family in ("D", "Dminus"):
        return Fraction(1, m + 1)
    return Fraction(1, t.index)


@dataclass(frozen=True)
class SubordinationDag:
    """Directed graph T -> T' meaning T' occurs near T's equisingularity locus."""

    nodes: frozenset[SingularityType]
    edges: frozenset[tuple[SingularityType, SingularityType]]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError("edge endpoint not in node set")
        if self._has_cycle():
            raise ValueError("subordination relation must be acyclic")

    def _out(self, t: SingularityType):
        return [b for a, b in self.edges if a == t]

    def _has_cycle(self) -> bool:
        color: dict[SingularityType, int] = {}

        def visit(u) -> bool:
            color[u] = 1
            for v in self._out(u):
                if color.get(v, 0) == 1:
                    return True
                if color.get(v, 0) == 0 and visit(v):
                    return True
            color[u] = 2
            return False

        return any(color.get(u, 0) == 0 and visit(u) for u in self.nodes)

    def reachable(self, t: SingularityType) -> set[SingularityType]:
        t = t.canonical()
        if t not in self.nodes:
            raise ValueError(f"{t.label} is not a node of this diagram")
        seen: set[SingularityType] = set()
        stack = self._out(t)
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._out(u))
        return seen


_EDGE_LABELS = (
    ("A2", "A1"), ("A3", "A2"), ("A4", "A3"), ("A5", "A4"),
    ("A6", "A5"), ("A7", "A6"), ("A8", "A7"),
    ("D4-", "A3"), ("D4+", "A3"),
    ("D5", "D4-"), ("D5", "D4+"), ("D5", "A4"),
    ("D6-", "D5"), ("D6+", "D5"), ("D6-", "A5"),
    ("E6", "A5"), ("E6", "D5"),
    ("D7", "D6-"), ("D7", "D6+"), ("D7", "A6"),
    ("E7", "E6"), ("E7", "A6"), ("E7", "D6-"),
    ("D8-", "D7"), ("D8+", "D7"), ("D8-", "A7"),
    ("E8", "E7"), ("E8", "A7"), ("E8", "D7"),
)

CANONICAL_LABELS = (
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8",
    "D4-", "D4+", "D5", "D6-", "D6+", "D7", "D8-", "D8+",
    "E6", "E7", "E8",
)


def default_dag() -> SubordinationDag:
    nodes = frozenset(SingularityType.parse(s) for s in CANONICAL_LABELS)
    edges = frozenset(
        (SingularityType.parse(a), SingularityType.parse(b)) for a, b in _EDGE_LABELS)
    return SubordinationDag(nodes, edges)


def subordinates(t: SingularityType, dag: SubordinationDag | None = None) -> set[SingularityType]:
    """Transitive closure of subordination below ``t``."""
    return (dag or default_dag()).reachable(t)


def dag_min_homogeneity(t: SingularityType, dag: SubordinationDag | None = None) -> Fraction:
    """Minimum r_j over ``t`` and everything reachable from it in the diagram.

    Diagnostic reconstruction of the threshold; differs from ``threshold`` for
    D4+ (1/4 here vs 1/3 tabulated), see module docstring.
    """
    dag = dag or default_dag()
    types = {t.canonical()} | dag.reachable(t)
    return min(min(build_phase(u).homogeneity.r) for u in types)


def quasi_homogeneity_defect(phase: PhaseFunction, lam, x, theta) -> tuple[float, float]:
    """Return (|phi(lam^{1-s} x, lam^r theta) - lam*phi(x, theta)|, lam*phi(x, theta))."""
    lam = float(lam)
    hom = phase.homogeneity
    xs = tuple(lam ** (1.0 - float(sj)) * xj for sj, xj in zip(hom.s, x))
    ts = tuple(lam ** float(rj) * tj for rj, tj in zip(hom.r, theta))
    lhs = float(phase.phi(xs, *ts))
    rhs = lam * float(phase.phi(tuple(x), *theta))
    return abs(lhs - rhs), rhs


def catalog_rows() -> list[dict]:
    """One row per canonical type, for the CLI dump and golden tests."""
    rows = []
    for label in CANONICAL_LABELS:
        t = SingularityType.parse(label)
        ph = build_phase(t)
        hom = ph.homogeneity
        rows.append({
            "family": t.family,
            "index": t.index,
            "sign": "+" if t.sign > 0 else "-",
            "label": t.label,
            "k": hom.k,
            "k0": hom.k0,
            "r": hom.r,
            "s": hom.s,
            "kappa": caustic_order(t),
            "delta0": threshold(t),
        })
    return rows
