"""Exact spectra of graphs and the periodicity classification.

Eigenvalues are found numerically, then each cluster is confirmed exactly
against the integer characteristic polynomial: an integer ``k`` must be a root
of the stated multiplicity, a surd ``q*sqrt(D)`` must come with the factor
``t**2 - q**2*D`` to that power. Only confirmed values count as exact.

A graph is periodic exactly when its eigenvalues are all integers or all
rational multiples of one square root; anything else is not periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

from . import intpoly
from .charpoly import charpoly as _charpoly
from .errors import IntegrityError, UnsupportedInputError
from .graph import Graph
from .quadfield import QuadraticNumber, is_square, squarefree_decompose

CLUSTER_TOL = 1e-7
NUMERIC_MOMENT_TOL = 1e-8

INTEGER = "integer"
SURD = "surd"
NUMERIC = "numeric"

ALL_INTEGER = "AllInteger"
ALL_SURD = "AllSurd"
MIXED = "Mixed"
NUMERIC_ONLY = "NumericOnly"


@dataclass(frozen=True)
class CharPoly:
    """Monic integer characteristic polynomial, ascending coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in intpoly.trim(self.coeffs))
        object.__setattr__(self, "coeffs", c)
        if c[-1] != 1:
            raise ValueError("characteristic polynomial must be monic")
        if len(c) > 1 and c[-2] != 0:
            raise ValueError("adjacency characteristic polynomials have zero trace term")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return intpoly.evaluate(self.coeffs, x)

    def __str__(self):
        return intpoly.to_string(self.coeffs)

    @classmethod
    def from_roots(cls, roots: Mapping[int, int]) -> CharPoly:
        return cls(intpoly.from_roots([r for r, m in roots.items() for _ in range(m)]))

    def is_even_or_odd(self) -> bool:
        """True iff p(-t) = +-p(t), i.e. the root multiset is symmetric about 0."""
        c = self.coeffs
        parity = self.degree % 2
        return all(c[k] == 0 for k in range(len(c)) if k % 2 != parity)


def char_poly(g: Graph) -> CharPoly:
    return CharPoly(_charpoly(g.adj))


def integer_roots(cp: CharPoly | Sequence[int]) -> dict[int, int]:
    """All integer roots with exact multiplicities, in descending order.

    Candidates are divisors of the lowest non-zero coefficient within the
    real-root bound sqrt(sum of squared roots); each is confirmed by repeated
    synthetic division.
    """
    real_rooted = isinstance(cp, CharPoly)
    coeffs = list(cp.coeffs if real_rooted else intpoly.trim(cp))
    if intpoly.degree(coeffs) < 1:
        return {}
    found: dict[int, int] = {}
    zeros = 0
    while coeffs[zeros] == 0:
        zeros += 1
    rest = coeffs[zeros:]
    if zeros:
        found[0] = zeros
    m = len(rest) - 1
    if m >= 1:
        lead = rest[-1]
        if lead != 1:
            raise ValueError("integer_roots expects a monic polynomial")
        const = abs(rest[0])
        if real_rooted:
            sq = rest[m - 1] ** 2 - 2 * rest[m - 2] if m >= 2 else rest[0] ** 2
            cands = (r for r in range(1, math.isqrt(sq) + 1) if const % r == 0)
        else:
            bound = 1 + max(abs(c) for c in rest[:-1])
            cands = (r for r in sympy.divisors(const) if r <= bound)
        for r in cands:
            for cand in (r, -r):
                mult = intpoly.root_multiplicity(rest, cand)
                if mult:
                    found[cand] = mult
    return dict(sorted(found.items(), reverse=True))


@dataclass(frozen=True)
class EigenvalueClass:
    """One distinct eigenvalue with multiplicity.

    ``exact`` holds the verified closed form when known: an integer, a surd
    ``q*sqrt(D)``, or (for ``numeric`` classes) a quadratic irrational.
    ``minpoly`` is the verified monic minimal polynomial, ascending.
    """

    kind: str
    multiplicity: int
    value: float
    exact: QuadraticNumber | None = None
    minpoly: tuple[int, ...] | None = None

    @classmethod
    def integer(cls, k: int, multiplicity: int) -> EigenvalueClass:
        return cls(INTEGER, multiplicity, float(k), QuadraticNumber(k), (-k, 1))

    @classmethod
    def surd(cls, q, delta: int, multiplicity: int) -> EigenvalueClass:
        x = QuadraticNumber.sqrt(delta, q)
        if x.is_rational() or x.d != delta:
            raise ValueError("surd needs a square-free radicand >= 2 and q != 0")
        sq = x.square().a
        mp = (-int(sq), 0, 1) if sq.denominator == 1 else None
        return cls(SURD, multiplicity, float(x), x, mp)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def delta(self) -> int | None:
        if self.kind == SURD:
            return self.exact.d
        return None

    def is_zero(self) -> bool:
        return self.kind == INTEGER and self.exact == 0

    def value_str(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        return repr(float(self.value))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value_str(),
            "multiplicity": self.multiplicity,
            "numeric": float(self.value),
        }


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues (descending) with recognition status."""

    classes: tuple[EigenvalueClass, ...]
    status: str
    delta: int | None = None
    charpoly: CharPoly | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return sum(c.multiplicity for c in self.classes)

    @property
    def values(self) -> np.ndarray:
        return np.array([c.value for c in self.classes])

    @property
    def multiplicities(self) -> list[int]:
        return [c.multiplicity for c in self.classes]

    def __len__(self):
        return len(self.classes)

    def as_dict(self) -> dict[str, int]:
        return {c.value_str(): c.multiplicity for c in self.classes}

    def integer_multiplicities(self) -> dict[int, int]:
        if self.status != ALL_INTEGER:
            raise UnsupportedInputError("spectrum is not all-integer")
        return {int(c.exact.a): c.multiplicity for c in self.classes}

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.classes]

    @classmethod
    def from_exact(cls, mults: Mapping) -> Spectrum:
        """Spectrum from exact values (ints, QuadraticNumbers or strings) to multiplicities."""
        from .quadfield import parse_quadratic

        classes = []
        for val, m in mults.items():
            if isinstance(val, str):
                val = parse_quadratic(val)
            x = val if isinstance(val, QuadraticNumber) else QuadraticNumber(val)
            if int(m) < 1:
                raise ValueError("multiplicities must be positive")
            if x.is_rational():
                if x.a.denominator != 1:
                    raise ValueError(f"{x} is not an algebraic integer")
                classes.append(EigenvalueClass.integer(int(x.a), int(m)))
            elif x.a == 0:
                classes.append(EigenvalueClass.surd(x.b, x.d, int(m)))
            else:
                classes.append(EigenvalueClass(NUMERIC, int(m), float(x), x, _quad_minpoly(x)))
        classes.sort(key=lambda c: -c.value)
        status, delta = _status(classes)
        return cls(tuple(classes), status, delta)

    @classmethod
    def from_numeric(cls, eigs: Iterable[float], tol: float = CLUSTER_TOL) -> Spectrum:
        """Unverified spectrum from floating point eigenvalues alone."""
        classes = [
            EigenvalueClass(NUMERIC, cnt, mean) for mean, cnt in reversed(cluster(eigs, tol))
        ]
        return cls(tuple(classes), NUMERIC_ONLY)


def _quad_minpoly(x: QuadraticNumber):
    mp = x.minimal_polynomial()
    if all(c.denominator == 1 for c in mp):
        return tuple(int(c) for c in mp)
    return None


def cluster(eigs: Iterable[float], tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues whose consecutive gaps are at most ``tol``.

    Returns ``(mean, count)`` pairs in ascending order.
    """
    xs = np.sort(np.asarray(list(eigs), dtype=float))
    if xs.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(xs) > tol) + 1
    groups = np.split(xs, breaks)
    return [(float(gr.mean()), len(gr)) for gr in groups]


def _status(classes: Sequence[EigenvalueClass]) -> tuple[str, int | None]:
    if any(not c.is_exact for c in classes):
        return MIXED, None
    if all(c.kind == INTEGER for c in classes):
        return ALL_INTEGER, None
    nonzero = [c for c in classes if not c.is_zero()]
    deltas = {c.delta for c in nonzero}
    if all(c.kind == SURD for c in nonzero) and len(deltas) == 1:
        return ALL_SURD, deltas.pop()
    return MIXED, None


def recognize_spectrum(
    cp: CharPoly, numeric_eigs: Iterable[float], tol: float = CLUSTER_TOL
) -> Spectrum:
    """Match clustered numeric eigenvalues to exactly verified classes."""
    clusters = cluster(numeric_eigs, tol)
    n = sum(c for _, c in clusters)
    if n != cp.degree:
        raise ValueError(f"{n} eigenvalues for a degree {cp.degree} polynomial")
    phi = list(cp.coeffs)
    classes: list[EigenvalueClass | None] = [None] * len(clusters)
    for idx, (x, m) in enumerate(clusters):
        k = round(x)
        if abs(x - k) < 1e-3:
            mult = intpoly.root_multiplicity(phi, k)
            if mult:
                if mult != m:
                    raise IntegrityError(
                        f"eigenvalue {k}: numeric multiplicity {m}, exact multiplicity {mult}"
                    )
                classes[idx] = EigenvalueClass.integer(k, m)
                continue
        sq = round(x * x)
        if sq >= 2 and not is_square(sq) and abs(x * x - sq) < 1e-3:
            mult = intpoly.factor_multiplicity(phi, [-sq, 0, 1])
            if mult:
                if mult != m:
                    raise IntegrityError(
                        f"eigenvalue {x:.12g}: numeric multiplicity {m}, "
                        f"exact multiplicity {mult} of t^2-{sq}"
                    )
                f, delta = squarefree_decompose(sq)
                classes[idx] = EigenvalueClass.surd(f if x > 0 else -f, delta, m)
    # remaining clusters: look for a conjugate partner giving a rational quadratic factor
    for idx, (x, m) in enumerate(clusters):
        if classes[idx] is not None:
            continue
        for jdx, (y, my) in enumerate(clusters):
            if jdx == idx or my != m or classes[jdx] is not None and classes[jdx].kind != NUMERIC:
                continue
            s, p = round(x + y), round(x * y)
            if abs(x + y - s) > 1e-6 or abs(x * y - p) > 1e-6 * max(1, abs(p)):
                continue
            disc = s * s - 4 * p
            if disc <= 0 or is_square(disc):
                continue
            if intpoly.factor_multiplicity(phi, [p, -s, 1]) != m:
                continue
            root = QuadraticNumber(Fraction(s, 2), Fraction(1 if x > y else -1, 2), disc)
            classes[idx] = EigenvalueClass(NUMERIC, m, x, root, (p, -s, 1))
            break
        else:
            classes[idx] = EigenvalueClass(NUMERIC, m, x)
    ordered = sorted(classes, key=lambda c: -c.value)
    status, delta = _status(ordered)
    return Spectrum(tuple(ordered), status, delta, cp)


def compute_spectrum(g: Graph, method: str = "auto") -> Spectrum:
    from .jacobi import eigh

    evals, _ = eigh(g.adj, method)
    return recognize_spectrum(char_poly(g), evals)


@dataclass(frozen=True)
class ExactAngle:
    """The real number ``coeff * pi / sqrt(root)``."""

    coeff: Fraction
    root: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))

    @property
    def value(self) -> float:
        return float(self.coeff) * math.pi / math.sqrt(self.root)

    def __float__(self):
        return self.value

    def scaled(self, factor) -> ExactAngle:
        return ExactAngle(self.coeff * Fraction(factor), self.root)

    def __str__(self):
        num, den = self.coeff.numerator, self.coeff.denominator
        top = "π" if num == 1 else "-π" if num == -1 else f"{num}π"
        if self.root != 1:
            den_s = f"√{self.root}" if den == 1 else f"({den}√{self.root})"
        else:
            den_s = "" if den == 1 else str(den)
        return f"{top}/{den_s}" if den_s else top


@dataclass(frozen=True)
class RatioWitness:
    """Eigenvalues whose ratio (or ratio of differences) is irrational."""

    terms: tuple[str, ...]
    ratio: QuadraticNumber | None
    reason: str

    def to_json(self) -> dict:
        return {
            "terms": list(self.terms),
            "ratio": None if self.ratio is None else str(self.ratio),
            "reason": self.reason,
        }


def _rational_gcd(xs: Iterable[Fraction]) -> Fraction:
    g = Fraction(0)
    for x in xs:
        x = abs(Fraction(x))
        if g == 0:
            g = x
        elif x:
            g = Fraction(
                math.gcd(g.numerator * x.denominator, x.numerator * g.denominator),
                g.denominator * x.denominator,
            )
    return g


@dataclass(frozen=True)
class DifferenceLattice:
    """All pairwise differences are integer multiples of ``unit`` (> 0)."""

    unit: QuadraticNumber | None

    @property
    def period(self) -> ExactAngle | None:
        """Least t > 0 with t * unit in 2*pi*Z, or None when no difference exists."""
        u = self.unit
        if u is None:
            return None
        if u.is_rational():
            return ExactAngle(2 / u.a)
        if u.a == 0:
            return ExactAngle(2 / u.b, u.d)
        return None

    @property
    def period_value(self) -> float | None:
        if self.unit is None:
            return None
        return 2 * math.pi / float(self.unit)


def difference_lattice(values: Sequence[QuadraticNumber]) -> DifferenceLattice | RatioWitness:
    """Test whether all ratios of differences of ``values`` are rational.

    On success returns the positive generator of the differences; otherwise a
    witness quadruple ``(a, b, c, d)`` with ``(a - b)/(c - d)`` irrational.
    """
    vals = list(values)
    if len(vals) < 2:
        return DifferenceLattice(None)
    base, ref = vals[0], vals[1]
    ref_diff = ref - base
    coeffs = [Fraction(1)]
    for v in vals[2:]:
        diff = v - base
        try:
            ratio = diff / ref_diff
        except ValueError:
            return RatioWitness(
                (str(v), str(base), str(ref), str(base)),
                None,
                "differences lie in different quadratic fields",
            )
        if not ratio.is_rational():
            return RatioWitness(
                (str(v), str(base), str(ref), str(base)), ratio, "ratio of differences is irrational"
            )
        coeffs.append(ratio.a)
    g = _rational_gcd(coeffs)
    unit = ref_diff * g
    if float(unit) < 0:
        unit = -unit
    return DifferenceLattice(unit)


@dataclass(frozen=True)
class PeriodicityVerdict:
    periodic: bool | None
    case: str
    delta: int | None = None
    gap: QuadraticNumber | None = None
    minimal_period: ExactAngle | None = None
    witness: RatioWitness | None = None
    bipartite: bool | None = None

    def period_string(self) -> str | None:
        if self.gap is None:
            return None
        g = self.gap if self.delta is None else self.gap / QuadraticNumber.sqrt(self.delta)
        g = _frac(g.a)
        if self.delta is None:
            return f"2π/{g}"
        return f"2π/√{self.delta}" if g == "1" else f"2π/({g}√{self.delta})"

    def to_json(self) -> dict:
        return {
            "periodic": self.periodic,
            "case": self.case,
            "delta": self.delta,
            "minimal_period": self.period_string(),
            "minimal_period_exact": None if self.minimal_period is None else str(self.minimal_period),
            "minimal_period_value": None
            if self.minimal_period is None
            else self.minimal_period.value,
            "bipartite": self.bipartite,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


CASE_INTEGER = "integer"
CASE_SURD = "surd"
CASE_NOT_PERIODIC = "not_periodic"
CASE_UNKNOWN = "unknown"


def periodicity_verdict(spec: Spectrum, graph: Graph | None = None) -> PeriodicityVerdict:
    """Periodic iff all eigenvalues are integers or all lie in Q*sqrt(D).

    For a periodic spectrum the minimal period reported is 2*pi/g, where g
    generates the additive group of eigenvalue differences: the least time at
    which H(t) is scalar.
    """
    if spec.status == NUMERIC_ONLY:
        return PeriodicityVerdict(None, CASE_UNKNOWN)
    if spec.status in (ALL_INTEGER, ALL_SURD):
        lat = difference_lattice([c.exact for c in spec.classes])
        assert isinstance(lat, DifferenceLattice)
        if spec.status == ALL_INTEGER:
            return PeriodicityVerdict(True, CASE_INTEGER, None, lat.unit, lat.period)
        symmetric = _symmetric(spec)
        bip = graph.is_bipartite() if graph is not None else symmetric
        if not (symmetric and bip):
            raise IntegrityError("surd spectrum on a graph that is not bipartite")
        return PeriodicityVerdict(True, CASE_SURD, spec.delta, lat.unit, lat.period, bipartite=bip)
    return PeriodicityVerdict(False, CASE_NOT_PERIODIC, witness=_irrational_pair(spec))


def _symmetric(spec: Spectrum) -> bool:
    vals = {c.exact: c.multiplicity for c in spec.classes}
    return all(vals.get(-x) == m for x, m in vals.items())


def _irrational_pair(spec: Spectrum) -> RatioWitness:
    nonzero = [c for c in spec.classes if not c.is_zero()]
    ints = [c for c in nonzero if c.kind == INTEGER]
    surds = [c for c in nonzero if c.kind == SURD]
    others = [c for c in nonzero if c.kind == NUMERIC]
    if ints and (surds or others):
        a, b = (surds or others)[0], ints[0]
    elif surds and others:
        a, b = others[0], surds[0]
    elif len({c.delta for c in surds}) > 1:
        a = surds[0]
        b = next(c for c in surds if c.delta != a.delta)
    else:
        a = others[0]
        conj = None
        if a.exact is not None:
            conj = next((c for c in others if c.exact == a.exact.conjugate()), None)
        b = conj or next((c for c in nonzero if c is not a), a)
    ratio = None
    if a.exact is not None and b.exact is not None:
        try:
            ratio = a.exact / b.exact
        except ValueError:
            ratio = None
    if a.exact is None:
        reason = "eigenvalue is neither an integer nor a rational multiple of a square root"
    else:
        reason = "ratio of non-zero eigenvalues is irrational"
    return RatioWitness((a.value_str(), b.value_str()), ratio, reason)


def square_eigenvalue_check(spec: Spectrum) -> bool:
    """True iff every eigenvalue squared is an exact integer (periodic spectra only)."""
    if periodicity_verdict(spec).periodic is not True:
        raise UnsupportedInputError("square check applies to periodic spectra only")
    for c in spec.classes:
        sq = c.exact.square()
        if not sq.is_rational() or sq.a.denominator != 1:
            return False
    return True


@dataclass(frozen=True)
class MomentReport:
    vertices: int
    edges: int
    multiplicity_sum: int
    trace: str
    square_sum: str
    exact: bool


def _exact_total(terms: Iterable[QuadraticNumber]) -> dict[int, Fraction]:
    acc: dict[int, Fraction] = {1: Fraction(0)}
    for t in terms:
        acc[1] += t.a
        if t.b:
            acc[t.d] = acc.get(t.d, Fraction(0)) + t.b
    return {d: v for d, v in acc.items() if v or d == 1}


def _total_str(tot: dict[int, Fraction]) -> str:
    parts = [_frac(tot[1])] + [f"{_frac(v)}√{d}" for d, v in sorted(tot.items()) if d != 1]
    return " + ".join(parts)


def moment_checks(spec: Spectrum, g: Graph) -> MomentReport:
    """Check sum m = n, sum m*theta = 0 and sum m*theta^2 = 2|E|."""
    if spec.n != g.n:
        raise IntegrityError(f"multiplicities sum to {spec.n}, graph has {g.n} vertices")
    edges = g.num_edges
    if all(c.is_exact for c in spec.classes):
        tr = _exact_total(c.exact * c.multiplicity for c in spec.classes)
        sq = _exact_total(c.exact.square() * c.multiplicity for c in spec.classes)
        if tr != {1: 0}:
            raise IntegrityError(f"eigenvalue sum is {_total_str(tr)}, expected 0")
        if sq != {1: 2 * edges}:
            raise IntegrityError(f"sum of squared eigenvalues is {_total_str(sq)}, expected {2 * edges}")
        return MomentReport(g.n, edges, spec.n, _total_str(tr), _total_str(sq), True)
    vals, mult = spec.values, np.array(spec.multiplicities)
    tr = float(mult @ vals)
    sq = float(mult @ vals**2)
    if abs(tr) > NUMERIC_MOMENT_TOL:
        raise IntegrityError(f"eigenvalue sum is {tr:.3e}, expected 0")
    if abs(sq - 2 * edges) > NUMERIC_MOMENT_TOL:
        raise IntegrityError(f"sum of squared eigenvalues is {sq!r}, expected {2 * edges}")
    return MomentReport(g.n, edges, spec.n, repr(tr), repr(sq), False)


def path_charpoly(n: int) -> CharPoly:
    """phi(P_n) via phi(P_{k+1}) = t phi(P_k) - phi(P_{k-1}), phi(P_0) = 1, phi(P_1) = t."""
    if n < 1:
        raise ValueError("path needs n >= 1")
    prev, cur = [1], [0, 1]
    for _ in range(n - 1):
        shifted = [0] + cur
        nxt = [a - (prev[i] if i < len(prev) else 0) for i, a in enumerate(shifted)]
        prev, cur = cur, nxt
    return CharPoly(cur)


def implied_edge_count(spec: Spectrum) -> int:
    """Half the exact sum of m * theta^2; the edge count of any graph with this spectrum."""
    if not all(c.is_exact for c in spec.classes):
        raise UnsupportedInputError("needs an exactly recognized spectrum")
    tot = _exact_total(c.exact.square() * c.multiplicity for c in spec.classes)
    if set(tot) != {1} or tot[1].denominator != 1 or tot[1] % 2:
        raise IntegrityError(f"sum of squared eigenvalues {_total_str(tot)} is not an even integer")
    return int(tot[1]) // 2
