"""Spectral projectors of A and the vertex-level periodicity test built on them."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from . import intpoly
from .errors import IntegrityError
from .graph import Graph, delete_vertex
from .jacobi import eigh
from .spectrum import (
    NUMERIC_ONLY,
    DifferenceLattice,
    ExactAngle,
    PeriodicityVerdict,
    RatioWitness,
    Spectrum,
    char_poly,
    difference_lattice,
    periodicity_verdict,
    recognize_spectrum,
)

PROJECTOR_TOL = 1e-9
SUPPORT_THRESHOLD = 1e-8
MATCH_TOL = 1e-7
# projector pair products are only checked up to this order
PAIRWISE_CHECK_MAX_N = 512


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Orthogonal projectors onto the eigenspaces, ordered like ``spectrum.classes``."""

    graph: Graph
    spectrum: Spectrum
    projectors: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.spectrum.values

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def verdict(self) -> PeriodicityVerdict:
        return periodicity_verdict(self.spectrum, self.graph)

    @cached_property
    def diagonals(self) -> np.ndarray:
        """``diagonals[r, u] = (E_r)_{uu}``."""
        return np.einsum("rii->ri", self.projectors)

    def check(self, tol: float = PROJECTOR_TOL) -> float:
        """Verify the projector identities; returns the worst deviation."""
        e = self.projectors
        n = self.n
        eye = np.eye(n)
        worst = np.abs(e.sum(axis=0) - eye).max()
        worst = max(worst, np.abs(np.tensordot(self.values, e, axes=1) - self.graph.adj).max())
        for r, c in enumerate(self.spectrum.classes):
            worst = max(worst, np.abs(e[r] @ e[r] - e[r]).max())
            worst = max(worst, abs(np.trace(e[r]) - c.multiplicity))
        if n <= PAIRWISE_CHECK_MAX_N:
            for r in range(len(e)):
                for s in range(r + 1, len(e)):
                    worst = max(worst, np.abs(e[r] @ e[s]).max())
        if worst > tol:
            raise IntegrityError(f"projector identities violated by {worst:.3e}")
        return float(worst)

    def export_projectors(self, directory: str | Path) -> list[Path]:
        out = []
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for r, c in enumerate(self.spectrum.classes):
            path = d / f"projector_{r}.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow([f"# eigenvalue {c.value_str()} multiplicity {c.multiplicity}"])
                w.writerows(self.projectors[r].tolist())
            out.append(path)
        return out


def eigendecompose(
    g: Graph,
    spectrum: Spectrum,
    eigenpairs: tuple[np.ndarray, np.ndarray] | None = None,
    method: str = "auto",
    validate: bool = True,
) -> SpectralDecomposition:
    evals, vecs = eigenpairs if eigenpairs is not None else eigh(g.adj, method)
    if spectrum.n != g.n:
        raise IntegrityError("spectrum and graph disagree on the vertex count")
    projectors = np.empty((len(spectrum), g.n, g.n))
    used = np.zeros(len(evals), dtype=bool)
    for r, c in enumerate(spectrum.classes):
        idx = np.flatnonzero(np.abs(evals - c.value) <= MATCH_TOL)
        if len(idx) != c.multiplicity or used[idx].any():
            raise IntegrityError(
                f"eigenvalue class {c.value_str()}: expected multiplicity {c.multiplicity}, "
                f"found {len(idx)} numeric eigenvalues"
            )
        used[idx] = True
        v = vecs[:, idx]
        p = v @ v.T
        # bitwise symmetric, so H(t) entries are too
        projectors[r] = (p + p.T) / 2
    projectors.flags.writeable = False
    dec = SpectralDecomposition(g, spectrum, projectors)
    if validate:
        dec.check()
    return dec


def decompose(g: Graph, method: str = "auto", validate: bool = True) -> SpectralDecomposition:
    """Exact spectrum plus projectors in one pass (a single eigensolve)."""
    evals, vecs = eigh(g.adj, method)
    spec = recognize_spectrum(char_poly(g), evals)
    return eigendecompose(g, spec, (evals, vecs), validate=validate)


@dataclass(frozen=True)
class EigenvalueSupport:
    vertex: int
    classes: tuple[int, ...]
    weights: tuple[float, ...]

    @property
    def dual_degree(self) -> int:
        return len(self.classes) - 1

    def to_json(self, spectrum: Spectrum) -> dict:
        return {
            "vertex": self.vertex,
            "support": [spectrum.classes[r].value_str() for r in self.classes],
            "dual_degree": self.dual_degree,
        }


def support(dec: SpectralDecomposition, u: int, threshold: float = SUPPORT_THRESHOLD) -> EigenvalueSupport:
    """Classes r with (E_r)_{uu} above ``threshold``."""
    dec.graph.check_vertex(u)
    diag = dec.diagonals[:, u]
    idx = tuple(int(r) for r in np.flatnonzero(diag > threshold))
    return EigenvalueSupport(u, idx, tuple(float(diag[r]) for r in idx))


def _refine(s: list[int], x: float, steps: int = 6, bits: int = 200) -> Fraction:
    """Newton-refine a simple root of the integer polynomial ``s`` near ``x``."""
    ds = intpoly.derivative(s)
    t = Fraction(x)
    grid = 1 << bits
    for _ in range(steps):
        d = intpoly.evaluate(ds, t)
        if d == 0:
            break
        t = t - intpoly.evaluate(s, t) / d
        t = Fraction(round(t * grid), grid)
    return t


def _newton_step(p: list[int], t: Fraction) -> float:
    d = intpoly.evaluate(intpoly.derivative(p), t)
    val = intpoly.evaluate(p, t)
    if val == 0:
        return 0.0
    if d == 0:
        return float("inf")
    return abs(float(val / d))


def support_via_charpoly(g: Graph, u: int, spectrum: Spectrum | None = None) -> frozenset[int]:
    """Exact support of e_u: poles of phi(X minus u, t) / phi(X, t) after cancellation.

    Returns indices into ``spectrum.classes``.
    """
    g.check_vertex(u)
    if spectrum is None or spectrum.charpoly is None:
        spectrum = decompose(g).spectrum
    phi = list(spectrum.charpoly.coeffs)
    phi_u = list(char_poly(delete_vertex(g, u)).coeffs) if g.n > 1 else [1]
    common = intpoly.gcd(phi, phi_u)
    poles = intpoly.primitive(intpoly.exact_quotient(phi, common))
    sqfree = intpoly.squarefree_part(phi)
    try:
        rest = intpoly.primitive(intpoly.exact_quotient(sqfree, poles))
    except ArithmeticError:
        raise IntegrityError("pole polynomial does not divide the square-free part") from None
    chosen = []
    for r, c in enumerate(spectrum.classes):
        if c.minpoly is not None:
            in_poles = intpoly.factor_multiplicity(poles, list(c.minpoly)) > 0
            in_rest = intpoly.factor_multiplicity(rest, list(c.minpoly)) > 0
        else:
            t = _refine(sqfree, c.value)
            in_poles = _newton_step(poles, t) < 1e-30
            in_rest = _newton_step(rest, t) < 1e-30
        if in_poles == in_rest:
            raise IntegrityError(f"cannot place eigenvalue {c.value_str()} among the poles")
        if in_poles:
            chosen.append(r)
    if len(chosen) != intpoly.degree(poles):
        raise IntegrityError(
            f"{len(chosen)} supported classes but the pole polynomial has degree "
            f"{intpoly.degree(poles)}"
        )
    return frozenset(chosen)


@dataclass(frozen=True)
class RatioCondition:
    """``holds`` is None when some supported eigenvalue has no exact form."""

    holds: bool | None
    witness: RatioWitness | None = None
    lattice: DifferenceLattice | None = None


def ratio_condition(sup: EigenvalueSupport, spectrum: Spectrum) -> RatioCondition:
    """Are all ratios of differences of supported eigenvalues rational?"""
    cls = [spectrum.classes[r] for r in sup.classes]
    if any(c.exact is None for c in cls):
        return RatioCondition(None)
    res = difference_lattice([c.exact for c in cls])
    if isinstance(res, RatioWitness):
        return RatioCondition(False, witness=res)
    return RatioCondition(True, lattice=res)


@dataclass(frozen=True)
class VertexPeriodicity:
    vertex: int
    periodic: bool | None
    support: EigenvalueSupport
    integral: bool | None = None
    period: ExactAngle | None = None
    period_value: float | None = None
    witness: RatioWitness | None = None
    # exact-support classes whose diagonal weight fell below the numeric threshold
    below_threshold: tuple[int, ...] = ()

    def to_json(self, spectrum: Spectrum) -> dict:
        out = self.support.to_json(spectrum)
        out.update(
            below_threshold=[spectrum.classes[r].value_str() for r in self.below_threshold],
            periodic=self.periodic,
            integral_support=self.integral,
            period=None if self.period is None else str(self.period),
            period_value=self.period_value,
            witness=None if self.witness is None else self.witness.to_json(),
        )
        return out


def is_periodic_at_vertex(
    dec: SpectralDecomposition, u: int, exact: bool = True, threshold: float = SUPPORT_THRESHOLD
) -> VertexPeriodicity:
    """Ratio-condition verdict at ``u`` with the least period when it holds.

    With ``exact`` the characteristic-polynomial support is authoritative. A
    numeric class outside it raises IntegrityError; exact classes whose weight
    sits below ``threshold`` are used and listed in ``below_threshold``.
    """
    sup = support(dec, u, threshold)
    missed: tuple[int, ...] = ()
    if exact:
        ex = support_via_charpoly(dec.graph, u, dec.spectrum)
        if not ex >= frozenset(sup.classes):
            raise IntegrityError(
                f"vertex {u}: numeric support {sorted(sup.classes)} is not inside exact support {sorted(ex)}"
            )
        if ex != frozenset(sup.classes):
            missed = tuple(sorted(ex - frozenset(sup.classes)))
            idx = tuple(sorted(ex))
            diag = dec.diagonals[:, u]
            sup = EigenvalueSupport(u, idx, tuple(float(diag[r]) for r in idx))
    rc = ratio_condition(sup, dec.spectrum)
    if rc.holds is None:
        if dec.spectrum.status == NUMERIC_ONLY:
            return VertexPeriodicity(u, None, sup)
        # unrecognized classes have no rational quadratic factor, so degree >= 3;
        # periodic vertices only support eigenvalues of degree <= 2
        bad = next(dec.spectrum.classes[r] for r in sup.classes if dec.spectrum.classes[r].exact is None)
        witness = RatioWitness((bad.value_str(),), None, "supported eigenvalue has degree at least 3")
        return VertexPeriodicity(u, False, sup, witness=witness, below_threshold=missed)
    if not rc.holds:
        return VertexPeriodicity(u, False, sup, witness=rc.witness, below_threshold=missed)
    integral = all(dec.spectrum.classes[r].kind == "integer" for r in sup.classes)
    lat = rc.lattice
    return VertexPeriodicity(u, True, sup, integral, lat.period, lat.period_value, below_threshold=missed)
