"""Exact arithmetic in real quadratic fields Q(sqrt(d))."""

from __future__ import annotations

import math
from fractions import Fraction

import sympy


def squarefree_decompose(m: int) -> tuple[int, int]:
    """Write ``m > 0`` as ``f**2 * d`` with ``d`` square-free; return ``(f, d)``."""
    if m <= 0:
        raise ValueError("need a positive integer")
    f, d = 1, 1
    for p, e in sympy.factorint(m).items():
        f *= p ** (e // 2)
        if e % 2:
            d *= p
    return f, d


def is_square(m: int) -> bool:
    return m >= 0 and math.isqrt(m) ** 2 == m


class QuadraticNumber:
    """``a + b*sqrt(d)`` with rational ``a``, ``b`` and square-free ``d >= 1``.

    Rationals are normalized to ``d == 1, b == 0``. Arithmetic between numbers
    in different fields raises unless one side is rational.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a, b = Fraction(a), Fraction(b)
        if d < 1:
            raise ValueError("radicand must be positive")
        if d != 1:
            f, d = squarefree_decompose(d)
            b *= f
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        self.a, self.b, self.d = a, b, d

    @classmethod
    def sqrt(cls, m: int, coeff=1) -> QuadraticNumber:
        """``coeff * sqrt(m)`` for a non-negative integer ``m``."""
        if m == 0:
            return cls(0)
        return cls(0, coeff, m)

    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def _field(self, other: QuadraticNumber) -> int:
        if self.d == other.d or other.d == 1:
            return self.d
        if self.d == 1:
            return other.d
        raise ValueError(f"Q(sqrt({self.d})) and Q(sqrt({other.d})) do not mix")

    @staticmethod
    def _coerce(x) -> QuadraticNumber:
        return x if isinstance(x, QuadraticNumber) else QuadraticNumber(x)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        inv = QuadraticNumber(o.a / n, -o.b / n, o.d)
        return self * inv

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self.a, self.b, self.d) == (o.a, o.b, o.d)

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __lt__(self, other):
        return float(self) < float(other)

    def square(self) -> QuadraticNumber:
        return self * self

    def minimal_polynomial(self) -> list[Fraction]:
        """Monic minimal polynomial over Q, ascending coefficients."""
        if self.is_rational():
            return [-self.a, Fraction(1)]
        return [self.norm(), -2 * self.a, Fraction(1)]

    def __repr__(self):
        return f"QuadraticNumber({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return _frac(self.a)
        root = f"√{self.d}"
        # put a and b over a common denominator: (p + q√d)/den
        den = math.lcm(self.a.denominator, self.b.denominator)
        p = int(self.a * den)
        q = int(self.b * den)
        if abs(q) == 1:
            surd = ("-" if q < 0 else "") + root
        else:
            surd = f"{q}{root}"
        if p == 0:
            body = surd
        else:
            sign = "+" if q > 0 else "-"
            mag = root if abs(q) == 1 else f"{abs(q)}{root}"
            body = f"{p}{sign}{mag}"
        if den == 1:
            return body
        return f"({body})/{den}" if p != 0 else f"{body}/{den}"


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_quadratic(text: str) -> QuadraticNumber:
    """Parse ``"3"``, ``"-2"``, ``"√2"``, ``"-3√5"``, ``"2*sqrt(3)"`` or ``"1/2"``."""
    s = text.strip().replace(" ", "").replace("sqrt(", "√").replace(")", "").replace("*", "")
    if "√" not in s:
        return QuadraticNumber(Fraction(s))
    coeff, rad = s.split("√", 1)
    if coeff in ("", "+"):
        c = Fraction(1)
    elif coeff == "-":
        c = Fraction(-1)
    else:
        c = Fraction(coeff)
    return QuadraticNumber.sqrt(int(rad), c)
