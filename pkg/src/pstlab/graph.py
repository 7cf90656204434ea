"""Simple undirected graphs with their standard constructors."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import GraphError


class Graph:
    """Immutable simple graph stored as a dense 0/1 adjacency matrix."""

    __slots__ = ("_adj", "_labels", "_cache")

    def __init__(self, adj, labels: Sequence[str] | None = None):
        a = np.array(adj, dtype=np.int64, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError("adjacency must be a square matrix")
        if a.shape[0] == 0:
            raise GraphError("graph must have at least one vertex")
        if not np.isin(a, (0, 1)).all():
            raise GraphError("adjacency entries must be 0 or 1")
        if not (a == a.T).all():
            raise GraphError("adjacency must be symmetric")
        if a.diagonal().any():
            raise GraphError("loops are not allowed")
        a.flags.writeable = False
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != a.shape[0]:
                raise GraphError("need one label per vertex")
        self._adj = a
        self._labels = labels
        self._cache: dict = {}

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> Graph:
        if n < 1:
            raise GraphError("graph must have at least one vertex")
        a = np.zeros((n, n), dtype=np.int64)
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            a[u, v] = a[v, u] = 1
        return cls(a, labels)

    @property
    def adj(self) -> np.ndarray:
        return self._adj

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    def label(self, u: int) -> str:
        return self._labels[u] if self._labels is not None else str(u)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self._adj, other._adj)
            and self._labels == other._labels
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self._adj, 1))
        return [(int(u), int(v)) for u, v in zip(us, vs)]

    @property
    def num_edges(self) -> int:
        return int(self._adj.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1)

    @property
    def max_degree(self) -> int:
        return int(self.degrees().max())

    def is_regular(self) -> bool:
        d = self.degrees()
        return bool((d == d[0]).all())

    def neighbors(self, u: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self._adj[u])]

    def check_vertex(self, u: int) -> int:
        if not (0 <= u < self.n):
            raise GraphError(f"vertex {u} out of range for n={self.n}")
        return int(u)

    def components(self) -> np.ndarray:
        if "components" not in self._cache:
            _, lab = connected_components(self._adj, directed=False)
            self._cache["components"] = lab
        return self._cache["components"]

    def is_connected(self) -> bool:
        return bool((self.components() == 0).all())

    def is_bipartite(self) -> bool:
        color = np.full(self.n, -1)
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.neighbors(u):
                    if color[v] < 0:
                        color[v] = 1 - color[u]
                        stack.append(v)
                    elif color[v] == color[u]:
                        return False
        return True

    def distances(self) -> DistanceData:
        if "distances" not in self._cache:
            d = shortest_path(self._adj.astype(float), unweighted=True, directed=False)
            d.flags.writeable = False
            self._cache["distances"] = DistanceData(d)
        return self._cache["distances"]

    def relabeled(self, labels: Sequence[str] | None) -> Graph:
        return Graph(self._adj, labels)

    def permuted(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``perm[i]`` of self renamed to ``i``."""
        p = np.asarray(perm)
        return Graph(self._adj[np.ix_(p, p)])


@dataclass(frozen=True, eq=False)
class DistanceData:
    """All-pairs BFS distances; ``inf`` marks unreachable pairs."""

    dist: np.ndarray

    @property
    def connected(self) -> bool:
        return bool(np.isfinite(self.dist).all())

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def matrix(self, k: int) -> np.ndarray:
        """0/1 adjacency of the distance-``k`` relation."""
        return (self.dist == k).astype(np.int64)


@dataclass(frozen=True)
class AntipodalPartition:
    """Antipodal classes of a graph, or the reason it has none."""

    antipodal: bool
    classes: tuple[tuple[int, ...], ...] = ()
    class_size: int = 0
    diameter: int = 0
    reason: str = ""


# constructors


def path(n: int) -> Graph:
    if n < 1:
        raise GraphError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete graph needs n >= 1")
    return Graph(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))


def empty(n: int) -> Graph:
    return Graph(np.zeros((n, n), dtype=np.int64))


def hypercube(d: int) -> Graph:
    """The d-cube: binary words of length d, adjacent at Hamming distance 1."""
    if d < 1:
        raise GraphError("hypercube needs d >= 1")
    x = np.arange(2**d)
    diff = x[:, None] ^ x[None, :]
    adj = (diff != 0) & ((diff & (diff - 1)) == 0)
    return Graph(adj.astype(np.int64))


def petersen() -> Graph:
    """Kneser graph K(5,2): 2-subsets of a 5-set, adjacent when disjoint."""
    pairs = list(itertools.combinations(range(5), 2))
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(10), 2)
        if not set(pairs[i]) & set(pairs[j])
    ]
    return Graph.from_edges(10, edges)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex (x, y) has index ``x * h.n + y``."""
    adj = np.kron(g.adj, np.eye(h.n, dtype=np.int64)) + np.kron(
        np.eye(g.n, dtype=np.int64), h.adj
    )
    labels = None
    if g.labels is not None or h.labels is not None:
        labels = [f"({g.label(x)},{h.label(y)})" for x in range(g.n) for y in range(h.n)]
    return Graph(adj, labels)


def distance_graph(g: Graph, k: int) -> Graph:
    """Graph on V(g) joining vertices at distance exactly ``k`` in ``g``."""
    if not g.is_connected():
        raise GraphError("distance graphs need a connected graph")
    if k < 1:
        raise GraphError("distance index must be >= 1")
    dd = g.distances()
    if k > dd.diameter:
        warnings.warn(
            f"k={k} exceeds diameter {int(dd.diameter)}; returning empty graph",
            stacklevel=2,
        )
    return Graph(dd.matrix(k), g.labels)


def delete_vertex(g: Graph, u: int) -> Graph:
    """Induced subgraph on V(g) minus ``u``; surviving labels are kept."""
    if g.n < 2:
        raise GraphError("cannot delete the only vertex")
    g.check_vertex(u)
    keep = [v for v in range(g.n) if v != u]
    labels = [g.label(v) for v in keep]
    return Graph(g.adj[np.ix_(keep, keep)], labels)


def antipodal_classes(g: Graph) -> AntipodalPartition:
    if not g.is_connected():
        raise GraphError("antipodal classes need a connected graph")
    dd = g.distances()
    d = int(dd.diameter)
    if d < 2:
        return AntipodalPartition(False, diameter=d, reason=f"diameter {d} < 2")
    far = dd.matrix(d)
    ncomp, lab = connected_components(far, directed=False)
    classes = tuple(
        tuple(int(v) for v in np.flatnonzero(lab == c)) for c in range(ncomp)
    )
    sizes = {len(c) for c in classes}
    if len(sizes) != 1:
        return AntipodalPartition(
            False, diameter=d, reason="components of the distance-d graph differ in size"
        )
    for c in classes:
        block = far[np.ix_(c, c)]
        if block.sum() != len(c) * (len(c) - 1):
            return AntipodalPartition(
                False,
                diameter=d,
                reason="a component of the distance-d graph is not a clique",
            )
    return AntipodalPartition(True, classes, sizes.pop(), d)
