"""Exact characteristic polynomials of integer matrices.

Multimodular: reduce to upper Hessenberg form modulo several word-size primes,
read off the characteristic polynomial with the Hessenberg recurrence, and
lift by Chinese remaindering against a coefficient bound. An extra prime
re-checks the lifted result.
"""

from __future__ import annotations

import math

import numpy as np

_PRIME_CEILING = 2**31 - 1


_PRIME_CACHE: list[int] = []


def _primes(count: int) -> list[int]:
    """The ``count`` largest primes below 2**31, descending."""
    p = _PRIME_CACHE[-1] - 2 if _PRIME_CACHE else _PRIME_CEILING
    while len(_PRIME_CACHE) < count:
        if _is_prime(p):
            _PRIME_CACHE.append(p)
        p -= 2
    return _PRIME_CACHE[:count]


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    # deterministic for m < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def _hessenberg_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Similarity-reduce ``a`` to upper Hessenberg form over GF(p)."""
    h = a % p
    n = h.shape[0]
    for j in range(n - 2):
        nz = np.flatnonzero(h[j + 1 :, j])
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            h[[i, j + 1], :] = h[[j + 1, i], :]
            h[:, [i, j + 1]] = h[:, [j + 1, i]]
        inv = pow(int(h[j + 1, j]), p - 2, p)
        u = h[j + 2 :, j] * inv % p
        if not u.any():
            continue
        # rows: R_k -= u_k R_{j+1}; columns: C_{j+1} += sum_k u_k C_k
        h[j + 2 :, :] = (h[j + 2 :, :] - np.outer(u, h[j + 1, :]) % p) % p
        h[:, j + 1] = (h[:, j + 1] + (h[:, j + 2 :] * u % p).sum(axis=1)) % p
    return h


def _charpoly_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Ascending coefficients of det(tI - a) over GF(p)."""
    h = _hessenberg_mod(a.astype(np.int64), p)
    n = h.shape[0]
    polys = np.zeros((n + 1, n + 1), dtype=np.int64)
    polys[0, 0] = 1
    for m in range(1, n + 1):
        cur = np.zeros(n + 1, dtype=np.int64)
        prev = polys[m - 1]
        cur[1:] = prev[:-1]
        cur = (cur - h[m - 1, m - 1] * prev % p) % p
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = prod * int(h[i, i - 1]) % p
            if prod == 0:
                break
            coef = int(h[i - 1, m - 1]) * prod % p
            if coef:
                cur = (cur - coef * polys[i - 1] % p) % p
        polys[m] = cur
    return polys[n]


def coefficient_bound(a: np.ndarray) -> int:
    """Bound on |coefficients| of det(tI - a): prod over rows of (1 + row 1-norm)."""
    rows = np.abs(a).sum(axis=1)
    bound = 1
    for r in rows:
        bound *= 1 + int(r)
    return bound


def charpoly(a) -> list[int]:
    """Exact characteristic polynomial det(tI - a), ascending coefficients.

    ``a`` must be a square integer matrix.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if not np.issubdtype(a.dtype, np.integer):
        raise TypeError("need an integer matrix")
    n = a.shape[0]
    if n == 0:
        return [1]
    bound = coefficient_bound(a)
    primes = []
    modulus = 1
    for p in _primes(bits_needed(a) // 30 + 2):
        primes.append(p)
        modulus *= p
        if modulus > 2 * bound:
            break
    else:
        raise ArithmeticError("ran out of primes for the coefficient bound")
    residues = [_charpoly_mod(a, p) for p in primes]
    coeffs = []
    for k in range(n + 1):
        r = 0
        m = 1
        for res, p in zip(residues, primes):
            # Garner-style incremental CRT
            t = (int(res[k]) - r) * pow(m, -1, p) % p
            r += m * t
            m *= p
        if r > modulus // 2:
            r -= modulus
        coeffs.append(r)
    check_p = _primes(len(primes) + 1)[-1]
    check = _charpoly_mod(a, check_p)
    if any((c - int(x)) % check_p for c, x in zip(coeffs, check)):
        raise ArithmeticError("characteristic polynomial failed the extra-prime check")
    return coeffs


def bits_needed(a: np.ndarray) -> int:
    return math.ceil(math.log2(2 * coefficient_bound(a) + 1))
