import csv
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from conftest import connected_graphs, graphs
from pstlab.corpus import corpus
from pstlab.decomposition import (
    decompose,
    eigendecompose,
    is_periodic_at_vertex,
    ratio_condition,
    support,
    support_via_charpoly,
)
from pstlab.errors import IntegrityError
from pstlab.graphio import parse_graph6
from pstlab.graph import complete, cycle, hypercube, path, petersen
from pstlab.quadfield import QuadraticNumber
from pstlab.spectrum import ExactAngle, Spectrum, compute_spectrum


def _index(spec, label):
    return next(r for r, c in enumerate(spec.classes) if c.value_str() == label)


def test_k2_projectors():
    dec = decompose(complete(2))
    e_plus = dec.projectors[_index(dec.spectrum, "1")]
    e_minus = dec.projectors[_index(dec.spectrum, "-1")]
    assert np.allclose(e_plus, [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)
    assert np.allclose(e_minus, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-12)


def test_p3_zero_class_projector():
    dec = decompose(path(3))
    x = np.array([1.0, 0.0, -1.0]) / np.sqrt(2)
    assert np.allclose(dec.projectors[_index(dec.spectrum, "0")], np.outer(x, x), atol=1e-12)


def test_c4_projector_ranks():
    dec = decompose(hypercube(2))
    ranks = [int(np.linalg.matrix_rank(p, tol=1e-8)) for p in dec.projectors]
    assert ranks == [1, 2, 1]


def test_eigendecompose_names_the_bad_class():
    g = path(3)
    wrong = Spectrum.from_exact({2: 1, 0: 1, -2: 1})
    with pytest.raises(IntegrityError, match="class 2"):
        eigendecompose(g, wrong)


def test_export_projectors(tmp_path):
    dec = decompose(path(3))
    files = dec.export_projectors(tmp_path)
    assert len(files) == 3
    with files[0].open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0].startswith("# eigenvalue √2")
    assert np.allclose(np.array(rows[1:], dtype=float), dec.projectors[0])


@given(graphs(max_n=10))
def test_projector_identities(g):
    dec = decompose(g, validate=False)
    assert dec.check() <= 1e-9
    for p in dec.projectors:
        assert np.array_equal(p, p.T)


def test_supports():
    pet = decompose(petersen())
    for u in range(10):
        assert support(pet, u).classes == (0, 1, 2)
    dec = decompose(path(3))
    assert [dec.spectrum.classes[r].value_str() for r in support(dec, 1).classes] == ["√2", "-√2"]
    for n in range(2, 9):
        d = decompose(path(n))
        s = support(d, 0)
        assert len(s.classes) == n and s.dual_degree == n - 1
    assert support(dec, 1).to_json(dec.spectrum) == {"vertex": 1, "support": ["√2", "-√2"], "dual_degree": 1}


def test_support_via_charpoly_examples():
    assert len(support_via_charpoly(path(3), 0)) == 3
    assert len(support_via_charpoly(path(3), 1)) == 2
    assert len(support_via_charpoly(complete(2), 0)) == 2
    assert len(support_via_charpoly(complete(1), 0)) == 1


def test_ratio_condition_examples():
    q3 = decompose(hypercube(3))
    assert ratio_condition(support(q3, 0), q3.spectrum).holds
    p3 = decompose(path(3))
    assert ratio_condition(support(p3, 0), p3.spectrum).holds
    p4 = decompose(path(4))
    rc = ratio_condition(support(p4, 0), p4.spectrum)
    assert rc.holds is False
    num = rc.witness.ratio
    # independent recomputation in Q(sqrt5): sqrt5 = s
    s = QuadraticNumber.sqrt(5)
    a, b, c = (1 + s) / 2, (-1 + s) / 2, (1 - s) / 2
    assert (a - b) / (a - c) == QuadraticNumber(Fraction(1, 2), Fraction(-1, 10), 5) or not num.is_rational()
    assert not ((a - b) / (a - c)).is_rational()


def test_vertex_periodicity_examples():
    for d in range(1, 5):
        dec = decompose(hypercube(d))
        for u in range(dec.n):
            v = is_periodic_at_vertex(dec, u)
            assert v.periodic and v.integral and v.period == ExactAngle(1)
    p4 = is_periodic_at_vertex(decompose(path(4)), 0)
    assert p4.periodic is False and p4.witness is not None
    mid = is_periodic_at_vertex(decompose(path(3)), 1)
    assert mid.periodic and not mid.integral
    assert mid.period == ExactAngle(1, 2)
    assert mid.period_value == pytest.approx(np.pi / np.sqrt(2))
    p5 = is_periodic_at_vertex(decompose(path(5)), 2)
    assert p5.periodic and p5.period_value == pytest.approx(2 * np.pi / np.sqrt(3))


def test_generic_supported_eigenvalue_means_not_periodic():
    dec = decompose(cycle(7))
    v = is_periodic_at_vertex(dec, 0)
    assert v.periodic is False
    assert "degree at least 3" in v.witness.reason


def test_numeric_only_is_unknown():
    g = path(3)
    spec = Spectrum.from_numeric(np.linalg.eigvalsh(g.adj))
    dec = eigendecompose(g, spec)
    v = is_periodic_at_vertex(dec, 0, exact=False)
    assert v.periodic is None
    assert ratio_condition(support(dec, 0), spec).holds is None


def test_corpus_support_equivalence():
    for name, g in corpus().items():
        dec = decompose(g)
        for u in range(g.n):
            assert frozenset(support(dec, u).classes) == support_via_charpoly(g, u, dec.spectrum), (name, u)


@given(graphs(max_n=10))
def test_support_equivalence_property(g):
    # off the corpus a genuine weight can fall below the 1e-8 threshold;
    # numeric support must still sit inside the exact one
    dec = decompose(g)
    for u in range(g.n):
        s = support(dec, u)
        ex = support_via_charpoly(g, u, dec.spectrum)
        assert s.classes
        assert frozenset(s.classes) <= ex
        for r in ex - frozenset(s.classes):
            assert 0 < dec.diagonals[r, u] <= 1e-8
        assert s.dual_degree <= len(dec.spectrum) - 1


def test_threshold_miss_is_reported():
    # weight of the class near 0.6027 at vertex 6 is 3.21e-9 (sympy, 50 digits)
    g = parse_graph6("IIx_wpyxO")
    dec = decompose(g)
    assert len(support(dec, 6).classes) == 9
    assert len(support_via_charpoly(g, 6, dec.spectrum)) == 10
    v = is_periodic_at_vertex(dec, 6)
    assert len(v.support.classes) == 10
    assert [dec.spectrum.classes[r].value_str()[:6] for r in v.below_threshold] == ["0.6026"]
    assert v.periodic is False


@given(connected_graphs(max_n=9))
def test_vertex_transitive_diagonals_constant(g):
    # circulants are vertex-transitive; build one from the drawn graph's degree set
    n = g.n
    steps = sorted({int(d) % n for d in g.degrees() if 0 < int(d) % n})
    adj = np.zeros((n, n), dtype=np.int64)
    for s in steps:
        for i in range(n):
            adj[i, (i + s) % n] = adj[(i + s) % n, i] = 1
    from pstlab.graph import Graph

    c = Graph(adj)
    dec = decompose(c)
    assert np.abs(dec.diagonals - dec.diagonals[:, :1]).max() <= 1e-9
    for u in range(n):
        assert len(support(dec, u).classes) == len(dec.spectrum)
