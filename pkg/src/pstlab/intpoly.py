"""Dense univariate polynomials over the integers.

Coefficient lists are ascending: ``p[k]`` multiplies ``t**k``. Only the few
operations the spectral code needs live here; gcds are delegated to sympy.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import sympy

_T = sympy.Symbol("t")


def trim(p: Sequence) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [0]


def degree(p: Sequence) -> int:
    p = trim(p)
    return -1 if p == [0] else len(p) - 1


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> list:
    return trim([k * p[k] for k in range(1, len(p))]) if len(p) > 1 else [0]


def mul(p: Sequence, q: Sequence) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def from_roots(roots: Sequence[int]) -> list[int]:
    p = [1]
    for r in roots:
        p = mul(p, [-r, 1])
    return p


def divmod_poly(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Quotient and remainder over the rationals.

    Stays in integer arithmetic when ``b`` is monic with integer coefficients.
    """
    b = trim(b)
    db = degree(b)
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    a = trim(a)
    if b[-1] == 1 and all(isinstance(x, int) for x in (*a, *b)):
        lead = 1
    else:
        a = [Fraction(x) for x in a]
        lead = Fraction(b[-1])
    q = [0] * max(len(a) - db, 1)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] if lead == 1 else a[k] / lead
        if c:
            q[k - db] = c
            for j in range(db + 1):
                a[k - db + j] -= c * b[j]
    return [_intify(x) for x in trim(q)], [_intify(x) for x in trim(a[:db] or [0])]


def _intify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def exact_quotient(a: Sequence, b: Sequence) -> list:
    q, r = divmod_poly(a, b)
    if r != [0]:
        raise ArithmeticError("division is not exact")
    return q


def deflate(p: Sequence[int], root: int) -> tuple[list[int], int]:
    """Synthetic division by ``t - root``; returns (quotient, remainder)."""
    out = []
    acc = 0
    for c in reversed(p):
        acc = acc * root + c
        out.append(acc)
    rem = out.pop()
    return trim(out[::-1]) if out else [0], rem


def factor_multiplicity(p: Sequence[int], factor: Sequence[int]) -> int:
    """Largest ``e`` with ``factor**e`` dividing ``p`` (``factor`` monic, non-constant)."""
    p = trim(p)
    if p == [0]:
        raise ValueError("zero polynomial")
    e = 0
    while degree(p) >= degree(factor):
        q, r = divmod_poly(p, factor)
        if r != [0]:
            break
        p, e = q, e + 1
    return e


def root_multiplicity(p: Sequence[int], root: int) -> int:
    p = trim(p)
    e = 0
    while degree(p) >= 1:
        q, r = deflate(p, root)
        if r != 0:
            break
        p, e = q, e + 1
    return e


def _to_sympy(p: Sequence) -> sympy.Poly:
    return sympy.Poly(list(reversed(trim(p))), _T, domain="QQ")


def _from_sympy(poly: sympy.Poly) -> list:
    coeffs = [sympy.Rational(c) for c in reversed(poly.all_coeffs())]
    return [int(c) if c.q == 1 else Fraction(int(c.p), int(c.q)) for c in coeffs]


def primitive(p: Sequence) -> list[int]:
    """Integer primitive part with positive leading coefficient."""
    fr = [Fraction(x) for x in trim(p)]
    den = 1
    for x in fr:
        den = math.lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return [0]
    if ints[-1] < 0:
        g = -g
    return [x // g for x in ints]


def gcd(p: Sequence, q: Sequence) -> list[int]:
    """Greatest common divisor over the rationals, as a primitive integer polynomial."""
    return primitive(_from_sympy(_to_sympy(p).gcd(_to_sympy(q))))


def squarefree_part(p: Sequence) -> list[int]:
    g = gcd(p, derivative(p))
    return primitive(exact_quotient(primitive(p), g))


def reciprocal(p: Sequence) -> list:
    """``t**deg(p) * p(1/t)``."""
    return trim(list(reversed(trim(p))))


def to_string(p: Sequence, var: str = "t") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        if mono and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return head + "".join(f" {s} {b}" for s, b in terms[1:])
