"""Bundled test corpus."""

from __future__ import annotations

from .graph import Graph, complete, cycle, hypercube, path, petersen


def corpus() -> dict[str, Graph]:
    """Paths and cycles up to 8 vertices, cubes up to dimension 4, Petersen, X(base4)."""
    from .hadamard import base4, graph_from_rshcd

    out: dict[str, Graph] = {}
    for n in range(1, 9):
        out[f"P{n}"] = path(n)
    for n in range(3, 9):
        out[f"C{n}"] = cycle(n)
    for d in range(1, 5):
        out[f"Q{d}"] = hypercube(d)
    out["petersen"] = petersen()
    out["X(base4)"] = graph_from_rshcd(base4()).graph
    return out


def extended_corpus() -> dict[str, Graph]:
    """The bundled corpus plus complete graphs and the 32-vertex X(base4 (x) base4)."""
    from .hadamard import base4, graph_from_rshcd, kron

    out = corpus()
    for n in range(2, 6):
        out[f"K{n}"] = complete(n)
    out["X(base4^2)"] = graph_from_rshcd(kron(base4(), base4())).graph
    return out
