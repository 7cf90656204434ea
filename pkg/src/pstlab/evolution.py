"""Continuous-time quantum walks H(t) = exp(iAt) and perfect state transfer certificates.

H(t) is assembled from the spectral projectors as sum_r exp(i t theta_r) E_r.
A Taylor series with scaling and squaring is kept as an independent oracle.

Times may be floats or ExactAngle values. For exact times the phase of each
exactly known eigenvalue is reduced modulo 2*pi before the trigonometric call,
so H(pi) on an integral graph is +-1 on each eigenspace to machine precision.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from . import intpoly
from .decomposition import SUPPORT_THRESHOLD, SpectralDecomposition, is_periodic_at_vertex
from .errors import IntegrityError, UnsupportedInputError
from .graph import Graph
from .quadfield import QuadraticNumber
from .spectrum import ALL_INTEGER, ExactAngle, Spectrum

Time = Union[float, ExactAngle]

UNITARY_TOL = 1e-9
TAYLOR_TAIL = 1e-12
TAYLOR_MAX_TERMS = 200
PERIODIC_TOL = 1e-9
PROMOTE_TOL = 1e-9
CERTIFY_TOL = 1e-6
RETURN_TOL = 1e-8
UNIT_CIRCLE_TOL = 1e-9
REFINE_XATOL = 1e-12


def _time_value(t: Time) -> float:
    return float(t)


def _exact_phase_fraction(theta: QuadraticNumber | None, t: Time) -> Fraction | None:
    """``theta * t / pi`` as a rational, when both factors are exact and it is rational."""
    if theta is None or not isinstance(t, ExactAngle):
        return None
    if t.root == 1:
        return theta.a * t.coeff if theta.b == 0 else None
    # theta * coeff / sqrt(root) = theta * coeff * sqrt(root) / root
    x = theta * QuadraticNumber.sqrt(t.root, t.coeff / t.root) if t.root != 1 else theta * t.coeff
    if not x.is_rational():
        return None
    return x.a


def phases(spectrum: Spectrum, t: Time) -> np.ndarray:
    """``exp(i t theta_r)`` for every class, exact-reduced where possible."""
    out = np.empty(len(spectrum), dtype=complex)
    tv = _time_value(t)
    for r, c in enumerate(spectrum.classes):
        f = _exact_phase_fraction(c.exact, t)
        if f is None:
            out[r] = np.exp(1j * c.value * tv)
            continue
        f = f % 2
        # snap the eight multiples of pi/4 to exact values
        quarter = f * 4
        if quarter.denominator == 1:
            re, im = _EIGHTH_ROOTS[int(quarter)]
            out[r] = complex(re, im)
        else:
            ang = math.pi * float(f)
            out[r] = complex(math.cos(ang), math.sin(ang))
    return out


_H = math.sqrt(0.5)
_EIGHTH_ROOTS = [(1, 0), (_H, _H), (0, 1), (-_H, _H), (-1, 0), (-_H, -_H), (0, -1), (_H, -_H)]


@dataclass(frozen=True, eq=False)
class UnitaryEvolution:
    t: Time
    H: np.ndarray

    @property
    def t_value(self) -> float:
        return _time_value(self.t)

    def unitarity_error(self) -> float:
        n = self.H.shape[0]
        return float(np.abs(self.H @ self.H.conj().T - np.eye(n)).max())

    def symmetry_error(self) -> float:
        return float(np.abs(self.H - self.H.T).max())

    def check(self, tol: float = UNITARY_TOL) -> None:
        err = max(self.unitarity_error(), self.symmetry_error())
        if err > tol:
            raise IntegrityError(f"H({self.t}) fails unitarity or symmetry by {err:.3e}")


def evolve(dec: SpectralDecomposition, t: Time, validate: bool = False) -> UnitaryEvolution:
    """H(t) from the spectral projectors."""
    if float(t) == 0.0:
        h = np.eye(dec.n, dtype=complex)
    else:
        h = np.tensordot(phases(dec.spectrum, t), dec.projectors, axes=1)
    ev = UnitaryEvolution(t, h)
    if validate:
        ev.check()
    return ev


def taylor_terms(norm: float, tol: float = TAYLOR_TAIL, max_terms: int = TAYLOR_MAX_TERMS) -> int | None:
    """Smallest K with norm**K / K! < tol, or None beyond ``max_terms``."""
    term = 1.0
    for k in range(1, max_terms + 1):
        term *= norm / k
        if term < tol:
            return k
    return None


def evolve_taylor(g: Graph, t: float, terms: int | None = None, tol: float = TAYLOR_TAIL) -> UnitaryEvolution:
    """exp(iAt) by a truncated power series with scaling and squaring.

    The argument is halved until ``||A|| |t| <= 1/2`` (with ``||A||`` bounded by
    the maximum degree), the series is summed to a tail below ``tol / 2**s``
    and the result squared ``s`` times.
    """
    tv = float(t)
    if not math.isfinite(tv):
        raise UnsupportedInputError("time must be finite")
    a = g.adj.astype(float)
    norm = float(g.max_degree) * abs(tv)
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = norm / 2**squarings
    piece_tol = tol / 2**squarings
    need = taylor_terms(x, piece_tol)
    if terms is None:
        if need is None:
            raise IntegrityError(f"tail bound {tol:g} unreachable within {TAYLOR_MAX_TERMS} terms")
        terms = need
    elif need is None or terms < need:
        raise IntegrityError(f"{terms} terms cannot reach tail bound {tol:g} at t={tv}")
    m = 1j * (tv / 2**squarings) * a
    n = g.n
    h = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        h = h + term
    for _ in range(squarings):
        h = h @ h
    return UnitaryEvolution(tv, h)


def fidelity(dec: SpectralDecomposition, u: int, v: int, t: Time) -> float:
    """|H(t)_{uv}|."""
    dec.graph.check_vertex(u)
    dec.graph.check_vertex(v)
    if float(t) == 0.0:
        return float(u == v)
    return float(abs(phases(dec.spectrum, t) @ dec.projectors[:, u, v]))


def is_periodic_graph(dec: SpectralDecomposition, tau: Time, tol: float = PERIODIC_TOL) -> bool:
    """Is H(tau) diagonal?"""
    h = evolve(dec, tau).H
    off = h - np.diag(h.diagonal())
    return bool(np.abs(off).max(initial=0.0) < tol)


@dataclass(frozen=True, eq=False)
class PSTCertificate:
    u: int
    v: int
    tau: ExactAngle | None
    tau_value: float
    gamma: complex
    permutation: np.ndarray | None
    residual: float
    return_residual: float
    symmetric: bool | None = None
    involutory: bool | None = None
    fixed_point_free: bool | None = None

    @property
    def partial(self) -> bool:
        return self.permutation is None

    @property
    def images(self) -> list[int] | None:
        if self.permutation is None:
            return None
        return [int(j) for j in self.permutation.argmax(axis=1)]

    def to_json(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "tau": {
                "exact": None if self.tau is None else str(self.tau),
                "numeric": self.tau_value,
            },
            "gamma": {"re": _clean(self.gamma.real), "im": _clean(self.gamma.imag)},
            "permutation": self.images,
            "residual": self.residual,
            "return_residual": self.return_residual,
            "symmetric": self.symmetric,
            "involutory": self.involutory,
            "fixed_point_free": self.fixed_point_free,
        }


def _clean(x: float) -> float:
    # drop -0.0 and 1e-17 noise in serialized phases
    r = round(x, 12)
    return 0.0 if r == 0 else r


def _double(t: Time) -> Time:
    return t.scaled(2) if isinstance(t, ExactAngle) else 2 * float(t)


def certify_pst(dec: SpectralDecomposition, u: int, v: int, tau: Time) -> PSTCertificate:
    """Certificate for perfect state transfer from ``u`` to ``v`` at ``tau``.

    When every entry of H(tau) is near 0 or near 1 in modulus the permutation
    P with H(tau) ~ gamma P is extracted and its structure reported; otherwise
    the certificate is partial and only covers the (u, v) entry.
    """
    if u == v:
        raise UnsupportedInputError("state transfer needs two distinct vertices")
    h = evolve(dec, tau).H
    entry = h[v, u]
    if abs(entry) < 1 - CERTIFY_TOL:
        raise UnsupportedInputError(
            f"|H({tau})[{u},{v}]| = {abs(entry):.9f} is not within {CERTIFY_TOL:g} of 1"
        )
    gamma = entry / abs(entry)
    mags = np.abs(h)
    big = mags >= 1 - CERTIFY_TOL
    small = mags <= CERTIFY_TOL
    complete = bool((big | small).all() and (big.sum(axis=1) == 1).all())
    h2 = evolve(dec, _double(tau)).H[:, u]
    target = np.zeros(dec.n, dtype=complex)
    target[u] = gamma * gamma
    ret = float(np.linalg.norm(h2 - target))
    if ret > RETURN_TOL:
        raise IntegrityError(f"H(2τ)e_u differs from γ²e_u by {ret:.3e}")
    exact_tau = tau if isinstance(tau, ExactAngle) else None
    if not complete:
        return PSTCertificate(u, v, exact_tau, float(tau), complex(gamma), None, float(1 - abs(entry)), ret)
    p = big.astype(np.int8)
    residual = float(np.abs(h - gamma * p).max())
    return PSTCertificate(
        u,
        v,
        exact_tau,
        float(tau),
        complex(gamma),
        p,
        residual,
        ret,
        symmetric=bool((p == p.T).all()),
        involutory=bool(((p @ p) == np.eye(dec.n, dtype=np.int8)).all()),
        fixed_point_free=bool(not p.diagonal().any()),
    )


@dataclass(frozen=True, eq=False)
class FidelityCurve:
    u: int
    v: int
    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "magnitude", "phase"])
        for t, a in zip(self.times, self.amplitudes):
            w.writerow([repr(float(t)), repr(float(abs(a))), repr(float(np.angle(a)))])
        return buf.getvalue()


@dataclass(frozen=True)
class ScanResult:
    curve: FidelityCurve
    maxima: tuple[tuple[float, float], ...]
    certificates: tuple[PSTCertificate, ...] = field(default=())

    @property
    def best(self) -> tuple[float, float] | None:
        return max(self.maxima, key=lambda m: m[1], default=None)


def _amplitude_fn(dec: SpectralDecomposition, u: int, v: int):
    coef = dec.projectors[:, u, v]
    vals = dec.values

    def amp(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.exp(1j * np.outer(ts, vals)) @ coef

    return amp


def default_window(dec: SpectralDecomposition) -> tuple[float, float]:
    verdict = dec.verdict
    if verdict.periodic is not True or verdict.minimal_period is None:
        raise UnsupportedInputError("graph is not periodic; pass an explicit window")
    return 0.0, verdict.minimal_period.value


def _snap(dec: SpectralDecomposition, u: int, t: float) -> Time:
    """Replace ``t`` by an exact odd multiple of T_u/2 when one is within 1e-6."""
    vp = is_periodic_at_vertex(dec, u, exact=False)
    if not vp.periodic or vp.period is None:
        return t
    half = vp.period.scaled(Fraction(1, 2))
    m = round(t / half.value)
    if m % 2 == 1 and abs(t - m * half.value) < 1e-6:
        return half.scaled(m)
    return t


def pst_scan(
    dec: SpectralDecomposition,
    u: int,
    v: int,
    window: tuple[float, float] | None = None,
    grid_points: int | None = None,
) -> ScanResult:
    """Sample |H(t)_{uv}| on a grid and refine each local maximum; perfect maxima get certificates."""
    dec.graph.check_vertex(u)
    dec.graph.check_vertex(v)
    lo, hi = window if window is not None else default_window(dec)
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise UnsupportedInputError(f"empty scan window [{lo}, {hi}]")
    theta_max = max(float(np.abs(dec.values).max()), 1.0)
    step = math.pi / (64 * theta_max)
    points = max(grid_points or 0, math.ceil((hi - lo) / step) + 1, 3)
    times = np.linspace(lo, hi, points)
    amp = _amplitude_fn(dec, u, v)
    amps = amp(times)
    mags = np.abs(amps)
    curve = FidelityCurve(u, v, times, amps)

    left = np.r_[-np.inf, mags[:-1]]
    right = np.r_[mags[1:], -np.inf]
    peaks = np.flatnonzero((mags > left) & (mags >= right))
    maxima = []
    for i in peaks:
        a, b = times[max(i - 1, 0)], times[min(i + 1, points - 1)]
        res = minimize_scalar(
            lambda t: -abs(amp(t)[0]), bounds=(a, b), method="bounded", options={"xatol": REFINE_XATOL}
        )
        t_best, f_best = (float(res.x), float(-res.fun)) if -res.fun >= mags[i] else (float(times[i]), float(mags[i]))
        maxima.append((t_best, min(f_best, 1.0)))
    certs = []
    if u != v:
        for t_best, f_best in maxima:
            if f_best >= 1 - PROMOTE_TOL:
                certs.append(certify_pst(dec, u, v, _snap(dec, u, t_best)))
    return ScanResult(curve, tuple(maxima), tuple(certs))


def detect_pst(
    dec: SpectralDecomposition,
    vertices: Sequence[int] | None = None,
    tol: float = PROMOTE_TOL,
    threshold: float = SUPPORT_THRESHOLD,
) -> list[PSTCertificate]:
    """All perfect state transfer pairs from the given vertices (default: all).

    PST from u at time tau forces H(2 tau) e_u to be a multiple of e_u, so tau is
    an odd multiple of T_u/2 for the least period T_u at u; and all odd
    multiples move e_u to the same vertex. One evaluation per period suffices.
    """
    verts = range(dec.n) if vertices is None else vertices
    cache: dict[ExactAngle | float, np.ndarray] = {}
    certs = []
    for u in verts:
        vp = is_periodic_at_vertex(dec, u, exact=False, threshold=threshold)
        if not vp.periodic or vp.period_value is None:
            continue
        tau: Time = vp.period.scaled(Fraction(1, 2)) if vp.period is not None else vp.period_value / 2
        if tau not in cache:
            cache[tau] = np.abs(evolve(dec, tau).H)
        col = cache[tau][:, u]
        v = int(col.argmax())
        if v != u and col[v] >= 1 - tol:
            certs.append(certify_pst(dec, u, v, tau))
    return certs


class MultiplicityEnumerator:
    """Laurent polynomial sum_theta m_theta z**theta over an integral spectrum."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, int]):
        clean = {int(k): int(m) for k, m in coeffs.items() if m}
        if not clean:
            raise ValueError("empty enumerator")
        if any(m < 0 for m in clean.values()):
            raise ValueError("multiplicities must be positive")
        self.coeffs = dict(sorted(clean.items(), reverse=True))

    @classmethod
    def from_spectrum(cls, spec: Spectrum) -> MultiplicityEnumerator:
        if spec.status != ALL_INTEGER:
            raise UnsupportedInputError("the multiplicity enumerator needs an all-integer spectrum")
        return cls(spec.integer_multiplicities())

    @property
    def min_exp(self) -> int:
        return min(self.coeffs)

    @property
    def n(self) -> int:
        return sum(self.coeffs.values())

    @property
    def first_moment(self) -> int:
        return sum(k * m for k, m in self.coeffs.items())

    def shifted(self) -> list[int]:
        """Ascending coefficients of z**(-min_exp) * mu(z)."""
        lo = self.min_exp
        out = [0] * (max(self.coeffs) - lo + 1)
        for k, m in self.coeffs.items():
            out[k - lo] = m
        return out

    def __call__(self, z):
        return sum(m * z**k for k, m in self.coeffs.items())

    def __eq__(self, other):
        if not isinstance(other, MultiplicityEnumerator):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return f"MultiplicityEnumerator({self.coeffs})"

    def __str__(self):
        p = self.shifted()
        terms = []
        for k in range(len(p) - 1, -1, -1):
            m = p[k]
            if not m:
                continue
            mono = "" if k == 0 else "z" if k == 1 else f"z^{k}"
            coef = str(m) if (m != 1 or k == 0) else ""
            terms.append(coef + mono)
        body = "+".join(terms)
        lo = self.min_exp
        if lo == 0:
            return body
        return f"z^{lo}({body})"

    def to_json(self) -> dict:
        return {"string": str(self), "coefficients": {str(k): m for k, m in self.coeffs.items()}}


def multiplicity_enumerator(spec: Spectrum) -> MultiplicityEnumerator:
    return MultiplicityEnumerator.from_spectrum(spec)


@dataclass(frozen=True)
class UnitCircleZero:
    z: complex
    t: float

    def to_json(self) -> dict:
        return {"re": _clean(self.z.real), "im": _clean(self.z.imag), "t": self.t}


def unit_circle_zero_test(mu: MultiplicityEnumerator) -> UnitCircleZero | None:
    """A zero of ``mu`` on the unit circle, or None when there is none.

    Zeros on the circle are shared with the reciprocal polynomial, so only
    roots of gcd(p, z**deg p(1/z)) are located numerically. The returned zero
    has the least argument in [0, 2 pi); ``t`` is that argument.
    """
    p = mu.shifted()
    g = intpoly.gcd(p, intpoly.reciprocal(p))
    if intpoly.degree(g) < 1:
        return None
    sq = intpoly.squarefree_part(g)
    roots = np.roots([float(c) for c in reversed(sq)])
    on = [z for z in roots if abs(abs(z) - 1) <= UNIT_CIRCLE_TOL]
    if not on:
        return None
    args = [float(np.angle(z)) % (2 * math.pi) for z in on]
    i = int(np.argmin(args))
    return UnitCircleZero(complex(on[i]), args[i])
