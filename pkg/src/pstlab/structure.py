"""Structural tests that can rule out PST before any evolution is computed."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import intpoly
from .charpoly import charpoly
from .errors import GraphError
from .graph import Graph, antipodal_classes

# powers stay in int64 while max_degree**k is below this
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class WalkRegularityReport:
    walk_regular: bool
    failing_power: int | None = None
    checked_up_to: int = 0

    def to_json(self) -> dict:
        return {
            "walk_regular": self.walk_regular,
            "failing_power": self.failing_power,
            "checked_up_to": self.checked_up_to,
        }


def is_walk_regular(g: Graph) -> WalkRegularityReport:
    """Are the diagonals of all powers of A constant?

    Powers up to m - 1 suffice, m the number of distinct eigenvalues (the
    degree of the minimal polynomial); larger powers are combinations of those.
    """
    n = g.n
    m = intpoly.degree(intpoly.squarefree_part(charpoly(g.adj)))
    a = g.adj.astype(np.int64)
    p = a.copy()
    big = False
    for k in range(2, m):
        if not big and max(g.max_degree, 1) ** k >= _INT64_SAFE:
            big = True
            p, a = p.astype(object), a.astype(object)
        p = p @ a
        d = p.diagonal()
        if any(d[i] != d[0] for i in range(1, n)):
            return WalkRegularityReport(False, k, k)
    return WalkRegularityReport(True, None, max(m - 1, 1))


@dataclass(frozen=True, eq=False)
class CoherentClosure:
    """Stable 2-dimensional refinement: ``colors[i, j]`` indexes ``basis``."""

    colors: np.ndarray
    homogeneous: bool
    commutative: bool
    primitive: bool | None
    rounds: int

    @property
    def rank(self) -> int:
        return int(self.colors.max()) + 1

    @property
    def basis(self) -> list[np.ndarray]:
        return [(self.colors == c).astype(np.int64) for c in range(self.rank)]

    def transpose_map(self) -> list[int]:
        """Color of the transpose of each basis matrix."""
        out = []
        for c in range(self.rank):
            i, j = np.argwhere(self.colors == c)[0]
            out.append(int(self.colors[j, i]))
        return out

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "homogeneous": self.homogeneous,
            "commutative": self.commutative,
            "primitive": self.primitive,
            "basis": [
                [[int(i), int(j)] for i, j in np.argwhere(self.colors == c)] for c in range(self.rank)
            ],
        }


def _refine(colors: np.ndarray) -> np.ndarray:
    k = int(colors.max()) + 1
    ind = [(colors == c).astype(np.int64) for c in range(k)]
    feats = [colors, colors.T]
    for a in range(k):
        for b in range(k):
            feats.append(ind[a] @ ind[b])
    sig = np.stack([f.ravel() for f in feats], axis=1)
    _, inv = np.unique(sig, axis=0, return_inverse=True)
    return inv.reshape(colors.shape)


def coherent_closure(g: Graph) -> CoherentClosure:
    """Coarsest coherent configuration containing I, A and J - I - A.

    Each round recolors (i, j) by its color, the color of (j, i) and the counts
    of k with (c(i, k), c(k, j)) = (a, b) for every color pair. New labels are
    ranks of the signatures, so the output depends only on the graph.
    """
    n = g.n
    adj = g.adj.astype(np.int64)
    colors = np.where(adj == 1, 1, 2)
    np.fill_diagonal(colors, 0)
    _, inv = np.unique(colors.ravel(), return_inverse=True)
    colors = inv.reshape(n, n)
    rounds = 0
    while True:
        new = _refine(colors)
        rounds += 1
        if new.max() == colors.max():
            break
        colors = new
    colors = new
    rank = int(colors.max()) + 1
    diag_colors = set(np.unique(colors.diagonal()).tolist())
    homogeneous = len(diag_colors) == 1
    basis = [(colors == c).astype(np.int64) for c in range(rank)]
    commutative = all(
        np.array_equal(basis[i] @ basis[j], basis[j] @ basis[i])
        for i in range(rank)
        for j in range(i + 1, rank)
    )
    primitive = None
    if homogeneous:
        primitive = True
        for c in range(rank):
            if c in diag_colors:
                continue
            m = basis[c] + basis[c].T
            ncomp, _ = connected_components(m, directed=False)
            if ncomp > 1:
                primitive = False
                break
    colors.flags.writeable = False
    return CoherentClosure(colors, homogeneous, commutative, primitive, rounds)


@dataclass(frozen=True)
class SchurProbe:
    row_sums: tuple[int, ...]

    @property
    def constant(self) -> bool:
        return len(set(self.row_sums)) <= 1

    @property
    def verdict(self) -> str:
        return "inconclusive" if self.constant else "not-in-homogeneous-coherent-algebra"


def schur_probe(g: Graph) -> SchurProbe:
    """Row sums of A o (A^2 - 4I) o (A^2 - 4I - J) (entrywise products)."""
    a = g.adj.astype(np.int64)
    n = g.n
    a2 = a @ a - 4 * np.eye(n, dtype=np.int64)
    m = a * a2 * (a2 - 1)
    return SchurProbe(tuple(int(x) for x in m.sum(axis=1)))


@dataclass(frozen=True, eq=False)
class DistanceRegularity:
    distance_regular: bool
    diameter: int
    distance_matrices: list[np.ndarray] = field(repr=False)
    b: tuple[int, ...] | None = None
    c: tuple[int, ...] | None = None
    failure: str | None = None

    @property
    def intersection_array(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """``({b_0, ..., b_{d-1}}, {c_1, ..., c_d})``."""
        if self.b is None:
            return None
        return self.b[:-1], self.c[1:]


def is_distance_regular(g: Graph) -> DistanceRegularity:
    """Do A A_i lie in the span of the distance matrices A_0..A_d for all i?"""
    if not g.is_connected():
        raise GraphError("distance-regularity needs a connected graph")
    dd = g.distances()
    d = int(dd.diameter)
    mats = [dd.matrix(i).astype(np.int64) for i in range(d + 1)]
    a = g.adj.astype(np.int64)
    b = [0] * (d + 1)
    c = [0] * (d + 1)
    for i, ai in enumerate(mats):
        prod = a @ ai
        for j, aj in enumerate(mats):
            vals = np.unique(prod[aj == 1])
            if len(vals) > 1:
                return DistanceRegularity(
                    False, d, mats, failure=f"A*A_{i} is not constant on distance class {j}"
                )
        # (A A_{i+1})[x, y] for d(x, y) = i counts neighbours of x one step further from y
        dist_i = np.argwhere(ai == 1)[0]
        x, y = dist_i
        if i + 1 <= d:
            b[i] = int((a[x] * mats[i + 1][y]).sum())
        if i >= 1:
            c[i] = int((a[x] * mats[i - 1][y]).sum())
    return DistanceRegularity(True, d, mats, tuple(b), tuple(c))


@dataclass(frozen=True)
class Obstruction:
    code: str
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class Preconditions:
    obstructions: tuple[Obstruction, ...]
    homogeneous: bool
    distance_regular: bool | None
    antipodal_pairs: bool | None

    @property
    def hopeless(self) -> bool:
        return bool(self.obstructions)

    def codes(self) -> list[str]:
        return [o.code for o in self.obstructions]

    def to_json(self) -> dict:
        return {
            "obstructions": [o.to_json() for o in self.obstructions],
            "homogeneous": self.homogeneous,
            "distance_regular": self.distance_regular,
            "antipodal_pairs": self.antipodal_pairs,
        }


def pst_preconditions(g: Graph, closure: CoherentClosure | None = None) -> Preconditions:
    """Necessary conditions for PST that structure alone can refute.

    Homogeneous closure: PST needs even order and an imprimitive algebra
    (K_2 is the one primitive exception). Distance-regular: PST needs
    antipodal classes of size two.
    """
    obs = []
    n = g.n
    if n == 1:
        obs.append(Obstruction("single-vertex", "one vertex: there is no pair to transfer between"))
        return Preconditions(tuple(obs), True, None, None)
    cl = closure if closure is not None else coherent_closure(g)
    if cl.homogeneous:
        if n % 2:
            obs.append(Obstruction("odd-order", f"homogeneous coherent closure with odd order {n}"))
        if cl.primitive and n > 2:
            obs.append(Obstruction("primitive", "every non-identity basis graph of the closure is connected"))
    drg = None
    pairs = None
    if g.is_connected():
        dr = is_distance_regular(g)
        drg = dr.distance_regular
        if drg:
            if dr.diameter == 1:
                pairs = n == 2
                if n > 2:
                    obs.append(
                        Obstruction("complete-graph", f"K_{n}: diameter 1, no antipodal pairing of size two")
                    )
            else:
                part = antipodal_classes(g)
                pairs = part.antipodal and part.class_size == 2
                if not pairs:
                    why = part.reason if not part.antipodal else f"antipodal classes of size {part.class_size}"
                    obs.append(Obstruction("not-antipodal-pairs", f"distance-regular but {why}"))
    return Preconditions(tuple(obs), cl.homogeneous, drg, pairs)
