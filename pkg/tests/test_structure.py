import networkx as nx
import numpy as np
import pytest
from hypothesis import given

from conftest import connected_graphs, graphs
from pstlab.corpus import corpus
from pstlab.decomposition import decompose
from pstlab.errors import GraphError
from pstlab.evolution import detect_pst
from pstlab.graph import Graph, complete, cycle, hypercube, path, petersen
from pstlab.hadamard import base4, graph_from_rshcd
from pstlab.structure import (
    _refine,
    coherent_closure,
    is_distance_regular,
    is_walk_regular,
    pst_preconditions,
    schur_probe,
)


def _diamond():
    a = np.ones((4, 4), dtype=np.int64) - np.eye(4, dtype=np.int64)
    a[0, 1] = a[1, 0] = 0
    return Graph(a)


def _nx(g):
    return nx.from_numpy_array(g.adj)


def _walk_regular_oracle(g):
    # diagonals of A^k for k up to n, float-free via Python ints
    a = [[int(x) for x in row] for row in g.adj]
    n = g.n
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        p = [[sum(p[i][m] * a[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
        if len({p[i][i] for i in range(n)}) > 1:
            return k
    return None


def test_walk_regular_examples():
    for g in (cycle(5), petersen(), hypercube(3)):
        assert is_walk_regular(g).walk_regular
    r = is_walk_regular(path(3))
    assert not r.walk_regular and r.failing_power == 2
    assert r.to_json() == {"walk_regular": False, "failing_power": 2, "checked_up_to": 2}
    assert is_walk_regular(complete(1)).walk_regular


@given(graphs(max_n=8))
def test_walk_regular_against_all_powers(g):
    r = is_walk_regular(g)
    assert r.failing_power == _walk_regular_oracle(g)
    if r.failing_power is not None:
        a = np.linalg.matrix_power(g.adj.astype(np.int64), r.failing_power)
        assert len(set(a.diagonal().tolist())) > 1


def test_walk_regular_big_powers_switch_to_exact_ints():
    # K_40 minus a perfect matching is regular with many large powers
    n = 40
    a = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
    for i in range(0, n, 2):
        a[i, i + 1] = a[i + 1, i] = 0
    assert is_walk_regular(Graph(a)).walk_regular


def test_closure_examples():
    pet = coherent_closure(petersen())
    assert pet.homogeneous and pet.rank == 3 and pet.commutative and pet.primitive
    p3 = coherent_closure(path(3))
    assert not p3.homogeneous and p3.primitive is None
    q3 = coherent_closure(hypercube(3))
    assert q3.homogeneous and q3.rank == 4 and not q3.primitive
    d = hypercube(3).distances().dist
    for b in q3.basis:
        vals = np.unique(d[b == 1])
        assert len(vals) == 1


def _check_coherent(cl):
    basis = cl.basis
    n = cl.colors.shape[0]
    assert np.array_equal(sum(basis), np.ones((n, n), dtype=np.int64))
    tmap = cl.transpose_map()
    for c, b in enumerate(basis):
        assert np.array_equal(b.T, basis[tmap[c]])
    # each diagonal color lives on the diagonal only
    diag = set(cl.colors.diagonal().tolist())
    for c in diag:
        assert np.array_equal(basis[c], np.diag(basis[c].diagonal()))
    # closed under products: B_a B_b is constant on every color class
    colors = np.asarray(cl.colors)
    _, first = np.unique(colors.ravel(), return_index=True)
    for x in basis:
        for y in basis:
            prod = x @ y
            assert np.array_equal(prod, prod.ravel()[first][colors])


@given(graphs(max_n=8))
def test_closure_axioms(g):
    cl = coherent_closure(g)
    _check_coherent(cl)
    again = _refine(np.asarray(cl.colors))
    assert again.max() == cl.colors.max()
    a = g.adj
    # A and I are unions of basis elements
    for c in range(cl.rank):
        vals = np.unique(a[cl.colors == c])
        assert len(vals) == 1


@given(graphs(max_n=8))
def test_closure_relabeling_invariant(g):
    perm = np.random.default_rng(g.n).permutation(g.n)
    a, b = coherent_closure(g), coherent_closure(g.permuted(perm))
    assert (a.rank, a.homogeneous, a.commutative, a.primitive) == (b.rank, b.homogeneous, b.commutative, b.primitive)


@given(graphs(max_n=8))
def test_homogeneous_implies_walk_regular(g):
    if coherent_closure(g).homogeneous:
        assert is_walk_regular(g).walk_regular


@given(graphs(max_n=8))
def test_schur_probe_consistent_with_closure(g):
    if not schur_probe(g).constant:
        assert not coherent_closure(g).homogeneous


def test_schur_probe_examples():
    assert schur_probe(petersen()).constant
    assert schur_probe(hypercube(2)).constant
    # P3 is triangle-free, so every row sum is 0
    assert schur_probe(path(3)).row_sums == (0, 0, 0)
    d = schur_probe(_diamond())
    assert d.row_sums == (0, 0, 2, 2) and d.verdict == "not-in-homogeneous-coherent-algebra"
    assert schur_probe(petersen()).verdict == "inconclusive"


def test_distance_regular_examples():
    for dim in range(1, 5):
        r = is_distance_regular(hypercube(dim))
        assert r.distance_regular and r.diameter == dim
        assert r.intersection_array == (tuple(range(dim, 0, -1)), tuple(range(1, dim + 1)))
    xh = is_distance_regular(graph_from_rshcd(base4()).graph)
    assert xh.distance_regular and xh.diameter == 3
    p4 = is_distance_regular(path(4))
    assert not p4.distance_regular and p4.failure
    assert is_distance_regular(petersen()).intersection_array == ((3, 2), (1, 1))
    with pytest.raises(GraphError):
        is_distance_regular(Graph(np.zeros((2, 2), dtype=np.int64)))


@given(connected_graphs(max_n=9))
def test_distance_regular_against_networkx(g):
    r = is_distance_regular(g)
    assert r.distance_regular == nx.is_distance_regular(_nx(g))
    if r.distance_regular:
        b, c = nx.intersection_array(_nx(g))
        assert r.intersection_array == (tuple(b), tuple(c))
        cl = coherent_closure(g)
        assert cl.homogeneous and cl.commutative and cl.rank == r.diameter + 1


def test_corpus_distance_regular_against_networkx():
    for name, g in corpus().items():
        if g.is_connected():
            assert is_distance_regular(g).distance_regular == nx.is_distance_regular(_nx(g)), name


def test_preconditions_examples():
    assert pst_preconditions(petersen()).codes() == ["primitive", "not-antipodal-pairs"]
    q3 = pst_preconditions(hypercube(3))
    assert q3.codes() == [] and q3.antipodal_pairs and q3.distance_regular
    assert pst_preconditions(complete(4)).codes() == ["primitive", "complete-graph"]
    assert pst_preconditions(complete(2)).codes() == []
    assert pst_preconditions(complete(1)).codes() == ["single-vertex"]
    assert pst_preconditions(cycle(5)).codes() == ["odd-order", "primitive", "not-antipodal-pairs"]
    assert pst_preconditions(cycle(6)).codes() == []
    assert pst_preconditions(graph_from_rshcd(base4()).graph).codes() == []
    j = pst_preconditions(petersen()).to_json()
    assert j["obstructions"][0]["code"] == "primitive" and j["homogeneous"]


@given(graphs(max_n=8))
def test_obstructions_are_sound(g):
    # a refuted graph never has PST
    if pst_preconditions(g).hopeless:
        assert detect_pst(decompose(g)) == []


def test_corpus_structural_properties():
    for name, g in corpus().items():
        cl = coherent_closure(g)
        if not cl.homogeneous:
            continue
        for c in detect_pst(decompose(g)):
            if c.partial:
                continue
            assert g.n % 2 == 0, name
            assert c.symmetric and c.involutory and c.fixed_point_free, name
