"""Cyclic Jacobi eigensolver for dense real symmetric matrices.

Rotations are applied in round-robin order: each round annihilates n/2
disjoint off-diagonal pairs at once, so a round is a handful of vectorized
row and column updates. A sweep visits every pair exactly once.
"""

from __future__ import annotations

import functools
import os

import numpy as np

from .errors import IntegrityError

DEFAULT_RESIDUAL = 1e-12
MAX_SWEEPS = 60
# above this order LAPACK is used unless the caller insists on Jacobi
JACOBI_MAX_N = 256


def residual_target() -> float:
    """Eigensolver residual target; overridable through ``PSTLAB_PRECISION``."""
    raw = os.environ.get("PSTLAB_PRECISION")
    if not raw:
        return DEFAULT_RESIDUAL
    try:
        val = float(raw)
    except ValueError:
        raise ValueError(f"PSTLAB_PRECISION must be a float, got {raw!r}") from None
    if not val > 0:
        raise ValueError("PSTLAB_PRECISION must be positive")
    return val


@functools.lru_cache(maxsize=64)
def _schedule(m: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin pairings of ``m`` (even) players; ``m - 1`` rounds."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigh(
    a: np.ndarray, tol: float | None = None, max_sweeps: int = MAX_SWEEPS
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of ``a``.

    Raises IntegrityError when ``max|a V - V diag(w)|`` exceeds ``tol`` times
    ``max(1, ||a||_F)``.
    """
    a0 = np.asarray(a, dtype=float)
    n = a0.shape[0]
    if a0.shape != (n, n):
        raise ValueError("need a square matrix")
    if not np.allclose(a0, a0.T, atol=0, rtol=0):
        raise ValueError("matrix is not symmetric")
    tol = residual_target() if tol is None else tol
    if n == 1:
        return a0.diagonal().copy(), np.ones((1, 1))
    m = n + (n % 2)
    w = np.zeros((m, m))
    w[:n, :n] = a0
    v = np.eye(m)
    scale = max(np.linalg.norm(a0), 1.0)
    rounds = _schedule(m)
    for _ in range(max_sweeps):
        off = np.linalg.norm(w - np.diag(w.diagonal()))
        if off <= 1e-15 * scale:
            break
        for p, q in rounds:
            apq = w[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            app, aqq = w[p, p], w[q, q]
            with np.errstate(divide="ignore", invalid="ignore"):
                theta = np.where(active, (aqq - app) / (2 * np.where(active, apq, 1)), 0)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1 / np.sqrt(t * t + 1)
            s = t * c
            wp, wq = w[:, p].copy(), w[:, q].copy()
            w[:, p] = c * wp - s * wq
            w[:, q] = s * wp + c * wq
            wp, wq = w[p, :].copy(), w[q, :].copy()
            cc, ss = c[:, None], s[:, None]
            w[p, :] = cc * wp - ss * wq
            w[q, :] = ss * wp + cc * wq
            w[p, q] = w[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    evals = w.diagonal()[:n].copy()
    vecs = v[:n, :n]
    order = np.argsort(evals, kind="stable")
    evals, vecs = evals[order], vecs[:, order]
    res = np.abs(a0 @ vecs - vecs * evals).max()
    if res > tol * scale:
        raise IntegrityError(f"Jacobi residual {res:.3e} misses target {tol:.1e}")
    return evals, vecs


def eigh(a: np.ndarray, method: str = "auto", tol: float | None = None):
    """Symmetric eigendecomposition; ``method`` is ``jacobi``, ``lapack`` or ``auto``."""
    n = np.asarray(a).shape[0]
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        return jacobi_eigh(a, tol)
    if method == "lapack":
        return np.linalg.eigh(np.asarray(a, dtype=float))
    raise ValueError(f"unknown eigensolver {method!r}")
