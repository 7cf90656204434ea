"""Text formats for graphs. Only the JSON form keeps vertex labels."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import GraphError, ParseError
from .graph import Graph

_HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in range(30, -1, -6))


def _decode_n(data: bytes) -> tuple[int, int]:
    """Return (n, number of bytes consumed)."""
    if not data:
        raise ParseError("empty graph6 string", 0)

    def six(pos: int, count: int) -> int:
        if len(data) < pos + count:
            raise ParseError("truncated graph6 size field", len(data))
        val = 0
        for k in range(count):
            b = data[pos + k]
            if not 63 <= b <= 126:
                raise ParseError(f"invalid graph6 byte {b!r}", pos + k)
            val = (val << 6) | (b - 63)
        return val

    if data[0] != 126:
        return six(0, 1), 1
    if len(data) > 1 and data[1] == 126:
        return six(2, 6), 8
    return six(1, 3), 4


def parse_graph6(text: str | bytes) -> Graph:
    """Decode a graph6 string (optional ``>>graph6<<`` header allowed)."""
    data = text.encode("ascii") if isinstance(text, str) else bytes(text)
    data = data.strip()
    start = 0
    if data.startswith(_HEADER.encode()):
        start = len(_HEADER)
        data = data[start:]
    n, pos = _decode_n(data)
    if n == 0:
        raise ParseError("graph6 graph has no vertices", start)
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = data[pos:]
    if len(body) != nbytes:
        raise ParseError(
            f"expected {nbytes} adjacency bytes for n={n}, found {len(body)}",
            start + pos + min(len(body), nbytes),
        )
    arr = np.frombuffer(body, dtype=np.uint8).astype(np.int64)
    bad = np.flatnonzero((arr < 63) | (arr > 126))
    if bad.size:
        raise ParseError(f"invalid graph6 byte {body[bad[0]]!r}", start + pos + int(bad[0]))
    vals = arr - 63
    bits = ((vals[:, None] >> np.arange(5, -1, -1)) & 1).ravel()
    if bits[nbits:].any():
        raise ParseError("non-zero padding bits", start + pos + nbytes - 1)
    iu, ju = _upper_order(n)
    adj = np.zeros((n, n), dtype=np.int64)
    adj[iu, ju] = bits[:nbits]
    adj = adj + adj.T
    return Graph(adj)


def _upper_order(n: int) -> tuple[np.ndarray, np.ndarray]:
    # graph6 lists x[i,j] for i<j ordered by column j, then row i
    cols = np.arange(n)
    jj = np.repeat(cols, cols)
    starts = cols * (cols - 1) // 2
    ii = np.arange(len(jj)) - np.repeat(starts, cols)
    return ii, jj


def serialize_graph6(g: Graph) -> str:
    n = g.n
    ii, jj = _upper_order(n)
    bits = g.adj[ii, jj]
    pad = (-len(bits)) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.int64)])
    vals = bits.reshape(-1, 6) @ (1 << np.arange(5, -1, -1))
    return _encode_n(n) + "".join(chr(int(v) + 63) for v in vals)


def parse_edge_list(text: str) -> Graph:
    """Parse ``n <count>`` followed by one ``u v`` pair per line.

    Blank lines and ``#`` comments are ignored. Duplicate edges collapse.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise ParseError("first line must be 'n <count>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise ParseError("vertex count must be positive", lineno)
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer endpoint in {line!r}", lineno) from None
        if u == v:
            raise GraphError(f"self-loop at vertex {u} (line {lineno})")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"vertex index out of range in {line!r} (line {lineno})")
        edges.append((u, v))
    if n is None:
        raise ParseError("missing 'n <count>' header", 0)
    return Graph.from_edges(n, edges)


def serialize_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> dict:
    out = {"n": g.n, "edges": [list(e) for e in g.edges()]}
    if g.labels is not None:
        out["labels"] = list(g.labels)
    return out


def graph_from_json(obj: dict | str) -> Graph:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    try:
        n = int(obj["n"])
        edges = [(int(u), int(v)) for u, v in obj.get("edges", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from None
    return Graph.from_edges(n, edges, obj.get("labels"))


FORMATS = ("graph6", "edges", "json")


def dumps(g: Graph, fmt: str = "graph6") -> str:
    if fmt == "graph6":
        return serialize_graph6(g) + "\n"
    if fmt == "edges":
        return serialize_edge_list(g)
    if fmt == "json":
        return json.dumps(graph_to_json(g)) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def sniff_format(text: str) -> str:
    s = text.lstrip()
    if s.startswith("{"):
        return "json"
    if s.startswith("n ") or s.startswith("#"):
        return "edges"
    return "graph6"


def loads(text: str, fmt: str | None = None) -> Graph:
    fmt = fmt or sniff_format(text)
    if fmt == "graph6":
        return parse_graph6(text)
    if fmt == "edges":
        return parse_edge_list(text)
    if fmt == "json":
        return graph_from_json(text)
    raise ValueError(f"unknown format {fmt!r}")


def read_graph(path: str | Path, fmt: str | None = None) -> Graph:
    return loads(Path(path).read_text(), fmt)


def write_graph(g: Graph, path: str | Path, fmt: str = "graph6") -> None:
    Path(path).write_text(dumps(g, fmt))


__all__ = [
    "FORMATS",
    "GraphError",
    "dumps",
    "graph_from_json",
    "graph_to_json",
    "loads",
    "parse_edge_list",
    "parse_graph6",
    "read_graph",
    "serialize_edge_list",
    "serialize_graph6",
    "sniff_format",
    "write_graph",
]
