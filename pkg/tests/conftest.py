import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pstlab.graph import Graph

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=9):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    a = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, 1)
    a[iu] = bits
    return Graph(a + a.T)


@st.composite
def connected_graphs(draw, min_n=2, max_n=9):
    g = draw(graphs(min_n, max_n))
    if g.is_connected():
        return g
    # join consecutive components through their first vertices
    a = np.array(g.adj)
    lab = g.components()
    reps = [int(np.flatnonzero(lab == c)[0]) for c in range(lab.max() + 1)]
    for x, y in zip(reps, reps[1:]):
        a[x, y] = a[y, x] = 1
    return Graph(a)


def isomorphic(g: Graph, h: Graph) -> bool:
    """Brute-force isomorphism test for small graphs (degree-pruned)."""
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    dg, dh = g.degrees(), h.degrees()
    if sorted(dg) != sorted(dh):
        return False
    n = g.n
    a, b = g.adj, h.adj
    perm = [-1] * n
    used = [False] * n

    def extend(u):
        if u == n:
            return True
        for v in range(n):
            if used[v] or dh[v] != dg[u]:
                continue
            if any(a[u, w] != b[v, perm[w]] for w in range(u)):
                continue
            perm[u], used[v] = v, True
            if extend(u + 1):
                return True
            used[v] = False
        return False

    return extend(0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number: int, ok: bool, detail: str) -> None:
        lines.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
