"""Regular symmetric Hadamard matrices with constant diagonal, and the graphs X(H).

All Hadamard checks are exact integer identities. X(H) has vertices (i, a)
with i = 1..n and a in {0, 1}, stored at index 2(i-1) + a; (i, a) ~ (j, b)
iff i != j and H[i, j] = (-1)**(a + b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import IntegrityError, NotHadamardError, ParseError, UnsupportedInputError
from .graph import Graph, antipodal_classes
from .spectrum import ExactAngle, Spectrum, compute_spectrum


@dataclass(frozen=True)
class RSHCDFlags:
    symmetric: bool
    regular: bool
    constant_diagonal: bool
    row_sum: int | None
    epsilon: int | None

    @property
    def is_rshcd(self) -> bool:
        return self.symmetric and self.regular and self.constant_diagonal


def _as_pm1(matrix) -> np.ndarray:
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise UnsupportedInputError("need a non-empty square matrix")
    if not np.isin(a, (1, -1)).all():
        raise UnsupportedInputError("entries must be +1 or -1")
    return a.astype(np.int64)


def is_rshcd(matrix) -> RSHCDFlags:
    """Exact Hadamard check plus the three RSHCD properties and epsilon.

    Raises NotHadamardError when H H^T != nI.
    """
    h = _as_pm1(matrix)
    n = h.shape[0]
    if not (h @ h.T == n * np.eye(n, dtype=np.int64)).all():
        raise NotHadamardError(f"rows of the order-{n} matrix are not orthogonal")
    sums = h.sum(axis=1)
    regular = bool((sums == sums[0]).all())
    diag = h.diagonal()
    const_diag = bool((diag == diag[0]).all())
    symmetric = bool((h == h.T).all())
    c = int(sums[0]) if regular else None
    eps = None
    if regular and const_diag and symmetric:
        if c * c != n:
            raise IntegrityError(f"regular Hadamard matrix with row sum {c} but order {n}")
        eps = 1 if c * int(diag[0]) > 0 else -1
    return RSHCDFlags(symmetric, regular, const_diag, c, eps)


class HadamardMatrix:
    """A verified +-1 matrix with H H^T = nI."""

    __slots__ = ("_h", "_flags")

    def __init__(self, matrix):
        h = _as_pm1(matrix)
        self._flags = is_rshcd(h)
        h.flags.writeable = False
        self._h = h

    @property
    def matrix(self) -> np.ndarray:
        return self._h

    @property
    def n(self) -> int:
        return self._h.shape[0]

    @property
    def flags(self) -> RSHCDFlags:
        return self._flags

    @property
    def is_rshcd(self) -> bool:
        return self._flags.is_rshcd

    @property
    def epsilon(self) -> int | None:
        return self._flags.epsilon

    @property
    def row_sum(self) -> int | None:
        return self._flags.row_sum

    @property
    def sqrt_n(self) -> int:
        r = math.isqrt(self.n)
        if r * r != self.n:
            raise UnsupportedInputError(f"order {self.n} is not a perfect square")
        return r

    def __neg__(self) -> HadamardMatrix:
        return HadamardMatrix(-self._h)

    def __eq__(self, other):
        if not isinstance(other, HadamardMatrix):
            return NotImplemented
        return np.array_equal(self._h, other._h)

    __hash__ = None

    def __repr__(self):
        return f"HadamardMatrix(n={self.n}, rshcd={self.is_rshcd}, epsilon={self.epsilon})"

    def to_text(self) -> str:
        rows = ["".join("+" if x > 0 else "-" for x in row) for row in self._h]
        return "\n".join([str(self.n), *rows]) + "\n"


def parse_hadamard(text: str) -> HadamardMatrix:
    """Read the ``n`` / rows-of-``+-`` format; whitespace inside rows is ignored."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty Hadamard file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError(f"first line must be the order, got {lines[0]!r}", 1) from None
    if n < 1:
        raise ParseError("order must be positive", 1)
    rows = lines[1:]
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, found {len(rows)}")
    out = np.empty((n, n), dtype=np.int64)
    for i, row in enumerate(rows):
        s = "".join(row.split())
        if len(s) != n or set(s) - {"+", "-"}:
            raise ParseError(f"row {i + 1} must have {n} entries of '+' or '-'", i + 2)
        out[i] = [1 if ch == "+" else -1 for ch in s]
    return HadamardMatrix(out)


def base4() -> HadamardMatrix:
    """The order-4 RSHCD J - 2R (R the reversal permutation): c = 2, epsilon = +1."""
    return HadamardMatrix(
        [[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]]
    )


def _require_rshcd(h: HadamardMatrix, what: str) -> None:
    if not h.is_rshcd:
        raise UnsupportedInputError(f"{what} is not a regular symmetric Hadamard matrix with constant diagonal")


def kron(h: HadamardMatrix, k: HadamardMatrix) -> HadamardMatrix:
    """Kronecker product; epsilon is multiplicative, and this is re-checked."""
    _require_rshcd(h, "left factor")
    _require_rshcd(k, "right factor")
    out = HadamardMatrix(np.kron(h.matrix, k.matrix))
    if not out.is_rshcd:
        raise IntegrityError("Kronecker product lost the RSHCD properties")
    if out.epsilon != h.epsilon * k.epsilon:
        raise IntegrityError(
            f"epsilon of the product is {out.epsilon}, expected {h.epsilon * k.epsilon}"
        )
    return out


def twist(h: HadamardMatrix) -> HadamardMatrix:
    """P(H (x) H^T) with P(u (x) v) = v (x) u.

    Entry ((i, j), (k, l)) is H[j, k] * H[l, i]; symmetric even when H is not.
    """
    f = h.flags
    if not (f.regular and f.constant_diagonal):
        raise UnsupportedInputError("twist needs a regular Hadamard matrix with constant diagonal")
    m = h.matrix
    n = h.n
    # t[i, j, k, l] = m[j, k] * m[l, i]
    t = np.einsum("jk,li->ijkl", m, m)
    out = HadamardMatrix(t.reshape(n * n, n * n))
    if not out.is_rshcd:
        raise IntegrityError("twisted product is not an RSHCD")
    return out


def normalized(h: HadamardMatrix) -> tuple[HadamardMatrix, bool]:
    """``(H, False)`` if the diagonal is +1, else ``(-H, True)``."""
    _require_rshcd(h, "input")
    if h.matrix[0, 0] == 1:
        return h, False
    return -h, True


@dataclass(frozen=True, eq=False)
class XHGraph:
    graph: Graph
    source: HadamardMatrix
    negated: bool

    @property
    def n(self) -> int:
        return self.source.n

    def antipodal_projector(self) -> np.ndarray:
        """F: the direct sum of n copies of [[1, 1], [1, 1]] / 2."""
        return np.kron(np.eye(self.n), np.full((2, 2), 0.5))

    def antipodal_pairs(self) -> list[tuple[int, int]]:
        return [(2 * i, 2 * i + 1) for i in range(self.n)]

    def expected_spectrum(self) -> Spectrum:
        n, r = self.n, self.source.sqrt_n
        a = (n + r) // 2
        return Spectrum.from_exact({n - 1: 1, r - 1: a, -1: n - 1, -r - 1: n - a})


def xh_adjacency(h: np.ndarray) -> np.ndarray:
    n = h.shape[0]
    sign = np.array([[1, -1], [-1, 1]])
    # block (i, j) is [[H_ij = 1, H_ij = -1], [H_ij = -1, H_ij = 1]] as 0/1
    blocks = (h[:, :, None, None] * sign[None, None, :, :] == 1).astype(np.int8)
    adj = blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    for i in range(n):
        adj[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = 0
    return adj


def graph_from_rshcd(h: HadamardMatrix, verify: bool = True) -> XHGraph:
    """X(H) after normalizing the diagonal to +1.

    With ``verify`` the regularity, diameter, antipodal classes and the exact
    spectrum are all checked, raising IntegrityError on any mismatch.
    """
    src, negated = normalized(h)
    n = src.n
    if n < 4:
        raise UnsupportedInputError("X(H) needs order at least 4")
    labels = [f"({i + 1},{a})" for i in range(n) for a in (0, 1)]
    g = Graph(xh_adjacency(src.matrix), labels)
    xh = XHGraph(g, src, negated)
    if verify:
        verify_xh(xh)
    return xh


def verify_xh(xh: XHGraph) -> None:
    g, n = xh.graph, xh.n
    deg = g.degrees()
    if not (deg == n - 1).all():
        raise IntegrityError(f"X(H) is not {n - 1}-regular")
    if g.distances().diameter != 3:
        raise IntegrityError(f"X(H) has diameter {g.distances().diameter}, expected 3")
    part = antipodal_classes(g)
    if not part.antipodal or sorted(part.classes) != xh.antipodal_pairs():
        raise IntegrityError("antipodal classes of X(H) are not {(i,0), (i,1)}")
    spec = compute_spectrum(g)
    want = xh.expected_spectrum()
    if spec.as_dict() != want.as_dict():
        raise IntegrityError(f"X(H) spectrum {spec.as_dict()} != {want.as_dict()}")


def srg_from_rshcd(h: HadamardMatrix) -> Graph:
    """The graph with adjacency (J + H)/2 - I; regular of degree (n + c)/2 - 1."""
    _require_rshcd(h, "input")
    if h.matrix[0, 0] != 1:
        raise UnsupportedInputError("srg_from_rshcd needs diagonal +1")
    n = h.n
    adj = (np.ones((n, n), dtype=np.int64) + h.matrix) // 2 - np.eye(n, dtype=np.int64)
    g = Graph(adj)
    if not g.is_regular():
        raise IntegrityError("(J + H)/2 - I is not regular")
    want = (n + h.row_sum) // 2 - 1
    if n > 1 and int(g.degrees()[0]) != want:
        raise IntegrityError(f"degree {int(g.degrees()[0])}, expected {want}")
    return g


def pst_time_xh(xh: XHGraph) -> ExactAngle:
    """pi / sqrt(n); the antipodal pairs of X(H) have PST then when sqrt(n) is even."""
    r = xh.source.sqrt_n
    if r % 2:
        raise UnsupportedInputError(f"sqrt(n) = {r} is odd; the PST argument needs it even")
    return ExactAngle(Fraction(1, r))


def sylvester(k: int) -> HadamardMatrix:
    """Sylvester matrix of order 2**k (symmetric, not regular for k odd)."""
    if k < 0:
        raise UnsupportedInputError("order exponent must be non-negative")
    h = np.ones((1, 1), dtype=np.int64)
    s = np.array([[1, 1], [1, -1]])
    for _ in range(k):
        h = np.kron(h, s)
    return HadamardMatrix(h)
