"""Command-line interface: ``pstlab analyze | construct | scan | mu``.

Exit codes: 0 success, 2 input error, 3 internal integrity violation.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import decomposition as dmod
from . import evolution as emod
from .errors import IntegrityError, PstlabError
from .graph import Graph, cartesian_product, complete, cycle, hypercube, path, petersen
from .graphio import FORMATS, dumps, read_graph
from .jacobi import residual_target
from .hadamard import HadamardMatrix, base4, graph_from_rshcd, kron, parse_hadamard, srg_from_rshcd, twist
from .quadfield import parse_quadratic
from .spectrum import (
    ALL_INTEGER,
    Spectrum,
    moment_checks,
    periodicity_verdict,
)
from .structure import coherent_closure, is_distance_regular, is_walk_regular, pst_preconditions

SCHEMA = "pstlab.analysis/1"
EXIT_OK, EXIT_INPUT, EXIT_INTEGRITY = 0, 2, 3


class UsageError(PstlabError, ValueError):
    pass


# time expressions: numbers, pi/π, sqrt(), + - * / **

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def parse_time(text: str) -> float:
    """Evaluate ``"pi/2"``, ``"π/sqrt(2)"``, ``"2*pi"``, ``"1.5"`` without eval()."""
    src = text.strip().replace("π", "pi")
    src = re.sub(r"√\s*([0-9.]+|pi)", r"sqrt(\1)", src).replace("√", "sqrt")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError:
        raise UsageError(f"cannot parse time {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
            and not node.keywords
        ):
            return math.sqrt(ev(node.args[0]))
        raise UsageError(f"unsupported element in time {text!r}")

    try:
        val = ev(tree)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot evaluate time {text!r}: {exc}") from None
    if not math.isfinite(val):
        raise UsageError(f"time {text!r} is not finite")
    return val


def parse_spectrum_file(text: str) -> Spectrum:
    """Lines ``eigenvalue:multiplicity``; ``#`` starts a comment."""
    mults = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            val, mult = line.rsplit(":", 1)
            x = parse_quadratic(val)
            m = int(mult)
        except ValueError:
            raise UsageError(f"line {lineno}: expected 'eigenvalue:multiplicity', got {raw!r}") from None
        if x in mults:
            raise UsageError(f"line {lineno}: eigenvalue {x} repeated")
        mults[x] = m
    if not mults:
        raise UsageError("empty spectrum file")
    return Spectrum.from_exact(mults)


def _resolve_vertex(g: Graph, token: str) -> int:
    if g.labels is not None and token in g.labels:
        return g.labels.index(token)
    try:
        u = int(token)
    except ValueError:
        raise UsageError(f"unknown vertex {token!r}") from None
    g.check_vertex(u)
    return u


def _tolerances(args) -> dict:
    return {
        "support": args.tol_support,
        "pst": args.tol_pst,
        "periodic": args.tol_periodic,
        "eigensolver_residual": residual_target(),
    }


def _mu_json(spec: Spectrum) -> dict | None:
    if spec.status != ALL_INTEGER:
        return None
    mu = emod.multiplicity_enumerator(spec)
    zero = emod.unit_circle_zero_test(mu)
    return {"enumerator": mu.to_json(), "unit_circle_zero": None if zero is None else zero.to_json()}


def analyze_graph(g: Graph, name: str, args) -> dict:
    clock = {}
    t0 = time.perf_counter()
    dec = dmod.decompose(g)
    clock["spectrum"] = time.perf_counter() - t0
    spec = dec.spectrum
    moments = moment_checks(spec, g)
    verdict = dec.verdict
    periodicity = verdict.to_json()
    if verdict.minimal_period is not None:
        # numeric confirmation that H is diagonal at the reported period
        periodicity["diagonal_at_period"] = emod.is_periodic_graph(dec, verdict.minimal_period, args.tol_periodic)
    t0 = time.perf_counter()
    vertices = [
        dmod.is_periodic_at_vertex(dec, u, exact=not args.no_exact_support, threshold=args.tol_support).to_json(spec)
        for u in range(g.n)
    ]
    clock["vertices"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    wr = is_walk_regular(g)
    cl = coherent_closure(g)
    dr = is_distance_regular(g) if g.is_connected() else None
    pre = pst_preconditions(g, cl)
    clock["structure"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    searched = args.force or not pre.hopeless
    certs = emod.detect_pst(dec, tol=args.tol_pst, threshold=args.tol_support) if searched else []
    clock["pst"] = time.perf_counter() - t0
    if pre.hopeless and certs:
        raise IntegrityError(
            f"PST certificate found despite obstructions {pre.codes()}"
        )
    pairs = sorted({(min(c.u, c.v), max(c.u, c.v)) for c in certs})
    report = {
        "schema": SCHEMA,
        "graph": {
            "id": name,
            "n": g.n,
            "edges": g.num_edges,
            "connected": g.is_connected(),
            "bipartite": g.is_bipartite(),
            "labels": list(g.labels) if g.labels is not None else None,
        },
        "spectrum": {
            "status": spec.status,
            "delta": spec.delta,
            "charpoly": str(spec.charpoly),
            "classes": spec.to_json(),
            "moments_exact": moments.exact,
        },
        "periodicity": periodicity,
        "vertices": vertices,
        "walk_regularity": wr.to_json(),
        "closure": {
            "rank": cl.rank,
            "homogeneous": cl.homogeneous,
            "commutative": cl.commutative,
            "primitive": cl.primitive,
        },
        "distance_regular": None
        if dr is None
        else {
            "distance_regular": dr.distance_regular,
            "diameter": dr.diameter,
            "intersection_array": None
            if dr.intersection_array is None
            else [list(x) for x in dr.intersection_array],
        },
        "obstructions": [o.to_json() for o in pre.obstructions],
        "pst": {
            "searched": searched,
            "pairs": [list(p) for p in pairs],
            "certificates": [c.to_json() for c in certs],
        },
        "multiplicity_enumerator": _mu_json(spec),
        "tolerances": _tolerances(args),
    }
    if args.timings:
        report["timings"] = clock
    return report


def analyze_spectrum(spec: Spectrum, name: str, args) -> dict:
    verdict = periodicity_verdict(spec)
    return {
        "schema": SCHEMA,
        "graph": {"id": name, "n": spec.n},
        "spectrum": {"status": spec.status, "delta": spec.delta, "classes": spec.to_json()},
        "periodicity": verdict.to_json(),
        "multiplicity_enumerator": _mu_json(spec),
        "tolerances": _tolerances(args),
    }


def _analyze_one(item) -> dict:
    path_str, args = item
    if args.spectrum_only:
        return analyze_spectrum(parse_spectrum_file(Path(path_str).read_text()), path_str, args)
    return analyze_graph(read_graph(path_str, args.format), path_str, args)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    items = [(p, args) for p in args.files]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(_analyze_one, items))
    else:
        reports = [_analyze_one(it) for it in items]
    payload = reports[0] if len(reports) == 1 else reports
    _emit(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", args.output)
    return EXIT_OK


def _int_param(params: list[str], idx: int, what: str) -> int:
    try:
        return int(params[idx])
    except IndexError:
        raise UsageError(f"missing parameter: {what}") from None
    except ValueError:
        raise UsageError(f"{what} must be an integer, got {params[idx]!r}") from None


def _hadamard_source(token: str) -> HadamardMatrix:
    if token == "base4":
        return base4()
    return parse_hadamard(Path(token).read_text())


def build_hadamard(params: list[str]) -> HadamardMatrix:
    if not params:
        raise UsageError("hadamard needs base4, kron A B, twist A or a matrix file")
    op = params[0]
    if op == "kron":
        if len(params) != 3:
            raise UsageError("usage: hadamard kron A B")
        return kron(_hadamard_source(params[1]), _hadamard_source(params[2]))
    if op == "twist":
        if len(params) != 2:
            raise UsageError("usage: hadamard twist A")
        return twist(_hadamard_source(params[1]))
    if len(params) != 1:
        raise UsageError("too many parameters")
    return _hadamard_source(op)


def cmd_construct(args) -> int:
    kind, params = args.kind, args.params
    fmt = args.format
    if kind == "hadamard":
        _emit(build_hadamard(params).to_text(), args.output)
        return EXIT_OK
    if kind == "path":
        g = path(_int_param(params, 0, "n"))
    elif kind == "cycle":
        g = cycle(_int_param(params, 0, "n"))
    elif kind == "complete":
        g = complete(_int_param(params, 0, "n"))
    elif kind == "hypercube":
        g = hypercube(_int_param(params, 0, "d"))
    elif kind == "petersen":
        g = petersen()
    elif kind == "cartesian":
        if len(params) != 2:
            raise UsageError("usage: construct cartesian G H")
        g = cartesian_product(read_graph(params[0]), read_graph(params[1]))
    elif kind == "xh-from-hadamard":
        g = graph_from_rshcd(build_hadamard(params)).graph
        fmt = fmt or "json"
    elif kind == "srg-from-hadamard":
        g = srg_from_rshcd(build_hadamard(params))
    else:
        raise UsageError(f"unknown construction {kind!r}")
    _emit(dumps(g, fmt or "graph6"), args.output)
    return EXIT_OK


def cmd_scan(args) -> int:
    g = read_graph(args.file, args.format)
    u, v = _resolve_vertex(g, args.u), _resolve_vertex(g, args.v)
    if u == v and not args.periodicity:
        raise UsageError("u = v: pass --periodicity for return amplitudes")
    t0, t1 = parse_time(args.t0), parse_time(args.t1)
    if args.steps < 2:
        raise UsageError("need at least 2 steps")
    dec = dmod.decompose(g)
    # ``steps`` intervals, so the grid contains both ends and t0 + k (t1 - t0) / steps
    res = emod.pst_scan(dec, u, v, (t0, t1), args.steps + 1)
    lines = [res.curve.to_csv()]
    for t, f in res.maxima:
        lines.append(f"# maximum t={t!r} magnitude={f:.12f}\n")
    for c in res.certificates:
        lines.append("# certificate " + json.dumps(c.to_json(), ensure_ascii=False) + "\n")
    _emit("".join(lines), args.output)
    return EXIT_OK


def cmd_mu(args) -> int:
    walk_regular = None
    if args.spectrum_only:
        spec = parse_spectrum_file(Path(args.file).read_text())
    else:
        g = read_graph(args.file, args.format)
        spec = dmod.decompose(g).spectrum
        walk_regular = is_walk_regular(g).walk_regular
    mu = emod.multiplicity_enumerator(spec)
    zero = emod.unit_circle_zero_test(mu)
    if zero is None:
        verdict = "no unit-circle zero: no PST if the graph is walk-regular"
    else:
        verdict = "unit-circle zero found: the trace test does not exclude PST"
    out = {
        "schema": SCHEMA,
        "enumerator": mu.to_json(),
        "unit_circle_zero": None if zero is None else zero.to_json(),
        "walk_regular": walk_regular,
        "verdict": verdict,
    }
    _emit(json.dumps(out, indent=2, ensure_ascii=False) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pstlab", description="Perfect state transfer analysis for graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        if fmt:
            sp.add_argument("--format", choices=FORMATS, default=None, help="graph file format (default: sniff)")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    a = sub.add_parser("analyze", help="full analysis report as JSON")
    a.add_argument("files", nargs="+")
    common(a)
    a.add_argument("--force", action="store_true", help="search for PST even when obstructed")
    a.add_argument("--jobs", type=int, default=1, help="parallel workers over input files")
    a.add_argument("--spectrum-only", action="store_true", help="inputs are eigenvalue:multiplicity files")
    a.add_argument("--no-exact-support", action="store_true", help="skip the char-poly support cross-check")
    a.add_argument("--tol-support", type=float, default=dmod.SUPPORT_THRESHOLD)
    a.add_argument("--tol-pst", type=float, default=emod.PROMOTE_TOL)
    a.add_argument("--tol-periodic", type=float, default=emod.PERIODIC_TOL)
    a.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("construct", help="write a standard graph or Hadamard matrix")
    c.add_argument(
        "kind",
        choices=[
            "path",
            "cycle",
            "complete",
            "hypercube",
            "cartesian",
            "petersen",
            "xh-from-hadamard",
            "srg-from-hadamard",
            "hadamard",
        ],
    )
    c.add_argument("params", nargs="*")
    common(c)
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("scan", help="fidelity curve |H(t)[u,v]| as CSV")
    s.add_argument("file")
    s.add_argument("u")
    s.add_argument("v")
    s.add_argument("t0")
    s.add_argument("t1")
    s.add_argument("steps", type=int, help="number of grid intervals (raised to the Nyquist bound if needed)")
    s.add_argument("--periodicity", action="store_true", help="allow u = v (return amplitude)")
    common(s)
    s.set_defaults(func=cmd_scan)

    m = sub.add_parser("mu", help="multiplicity enumerator and unit-circle test")
    m.add_argument("file")
    m.add_argument("--spectrum-only", action="store_true")
    common(m)
    m.set_defaults(func=cmd_mu)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IntegrityError as exc:
        print(f"pstlab: integrity check failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (PstlabError, ValueError, OSError) as exc:
        print(f"pstlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
