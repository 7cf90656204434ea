import json
import math
import subprocess
import sys

import pytest

from pstlab.cli import SCHEMA, main, parse_spectrum_file, parse_time
from pstlab.graph import hypercube, path, petersen
from pstlab.graphio import parse_graph6, read_graph, serialize_graph6, write_graph
from pstlab.spectrum import compute_spectrum

COUNTEREXAMPLE = "4:1\n2:3\n0:3\n-2:5\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def gfile(tmp_path):
    def make(g, name="g.g6"):
        p = tmp_path / name
        write_graph(g, p)
        return p

    return make


def test_parse_time():
    assert parse_time("pi/2") == math.pi / 2
    assert parse_time("π/sqrt(2)") == pytest.approx(math.pi / math.sqrt(2))
    assert parse_time("2*π/√3") == pytest.approx(2 * math.pi / math.sqrt(3))
    assert parse_time("1e-3") == 0.001
    for bad in ("__import__('os')", "pi(", "x", "2**1000000"):
        with pytest.raises(ValueError):
            parse_time(bad)


def test_parse_spectrum_file():
    s = parse_spectrum_file("# twelve-vertex counterexample\n" + COUNTEREXAMPLE)
    assert s.integer_multiplicities() == {4: 1, 2: 3, 0: 3, -2: 5}
    assert parse_spectrum_file("√2:1\n0:1\n-√2:1\n").delta == 2
    for bad in ("", "4\n", "4:1\n4:2\n", "x:1\n"):
        with pytest.raises(ValueError):
            parse_spectrum_file(bad)


def test_construct_hypercube(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "hypercube", 3)
    assert code == 0
    g = parse_graph6(out.strip())
    assert g.n == 8 and compute_spectrum(g) == compute_spectrum(hypercube(3))
    target = tmp_path / "q3.edges"
    assert run(capsys, "construct", "hypercube", 3, "--format", "edges", "-o", target)[0] == 0
    assert read_graph(target).num_edges == 12


def test_construct_xh_from_hadamard_file(capsys, tmp_path):
    had = tmp_path / "base4.had"
    assert run(capsys, "construct", "hadamard", "base4", "-o", had)[0] == 0
    assert had.read_text().splitlines()[0] == "4"
    out_path = tmp_path / "xh.json"
    assert run(capsys, "construct", "xh-from-hadamard", had, "-o", out_path)[0] == 0
    g = read_graph(out_path)
    assert g.n == 8 and g.labels[0] == "(1,0)"
    assert compute_spectrum(g).integer_multiplicities() == {3: 1, 1: 3, -1: 3, -3: 1}
    code, out, _ = run(capsys, "construct", "hadamard", "kron", had, "base4")
    assert code == 0 and out.splitlines()[0] == "16"
    code, out, _ = run(capsys, "construct", "srg-from-hadamard", "base4", "--format", "edges")
    assert code == 0


def test_construct_usage_errors(capsys):
    code, _, err = run(capsys, "construct", "path", 0)
    assert code == 2 and err.startswith("pstlab:")
    assert run(capsys, "construct", "path")[0] == 2
    assert run(capsys, "construct", "path", "x")[0] == 2
    assert run(capsys, "construct", "hadamard")[0] == 2
    assert run(capsys, "construct", "hadamard", "kron", "base4")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["construct", "moebius", "3"])
    assert exc.value.code == 2


def test_construct_cartesian(capsys, gfile):
    p2 = gfile(path(2), "p2.g6")
    code, out, _ = run(capsys, "construct", "cartesian", p2, p2)
    assert code == 0 and parse_graph6(out.strip()).num_edges == 4


def test_analyze_hypercube(capsys, gfile):
    code, out, _ = run(capsys, "analyze", gfile(hypercube(3)))
    assert code == 0
    r = json.loads(out)
    assert r["schema"] == SCHEMA
    assert r["periodicity"]["periodic"] and r["periodicity"]["minimal_period_exact"] == "π"
    assert r["periodicity"]["diagonal_at_period"]
    assert r["pst"]["pairs"] == [[0, 7], [1, 6], [2, 5], [3, 4]]
    assert {c["tau"]["exact"] for c in r["pst"]["certificates"]} == {"π/2"}
    assert r["obstructions"] == []
    assert "timings" not in r
    assert r["tolerances"]["support"] == 1e-8


def test_analyze_petersen(capsys, gfile):
    r = json.loads(run(capsys, "analyze", gfile(petersen()))[1])
    assert r["periodicity"]["minimal_period_exact"] == "2π"
    assert "primitive" in [o["code"] for o in r["obstructions"]]
    assert r["pst"] == {"searched": False, "pairs": [], "certificates": []}
    forced = json.loads(run(capsys, "analyze", gfile(petersen()), "--force")[1])
    assert forced["pst"]["searched"] and forced["pst"]["pairs"] == []


def test_analyze_p4(capsys, gfile):
    r = json.loads(run(capsys, "analyze", gfile(path(4)))[1])
    assert r["periodicity"]["periodic"] is False
    assert r["periodicity"]["witness"] is not None
    assert r["vertices"][0]["periodic"] is False and r["vertices"][0]["witness"]


def test_analyze_deterministic_and_jobs(capsys, gfile, tmp_path):
    files = [gfile(hypercube(2), "a.g6"), gfile(path(3), "b.g6")]
    first = run(capsys, "analyze", *files)[1]
    second = run(capsys, "analyze", *files)[1]
    par = run(capsys, "analyze", *files, "--jobs", 2)[1]
    assert first == second == par
    assert [r["graph"]["id"] for r in json.loads(first)] == [str(f) for f in files]


def test_analyze_timings(capsys, gfile):
    r = json.loads(run(capsys, "analyze", gfile(path(2)), "--timings")[1])
    assert set(r["timings"]) == {"spectrum", "vertices", "structure", "pst"}


def test_analyze_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.g6"
    bad.write_text("~~~~\n")
    assert run(capsys, "analyze", bad)[0] == 2
    assert run(capsys, "analyze", tmp_path / "missing.g6")[0] == 2


def test_analyze_integrity_error_exit_code(capsys, gfile, monkeypatch):
    import pstlab.decomposition as dmod
    from pstlab.errors import IntegrityError

    def boom(*a, **k):
        raise IntegrityError("forced")

    monkeypatch.setattr(dmod, "decompose", boom)
    code, _, err = run(capsys, "analyze", gfile(path(3)))
    assert code == 3 and "integrity" in err


def test_analyze_spectrum_only(capsys, tmp_path):
    f = tmp_path / "counterexample.spec"
    f.write_text(COUNTEREXAMPLE)
    r = json.loads(run(capsys, "analyze", f, "--spectrum-only")[1])
    assert r["multiplicity_enumerator"]["enumerator"]["string"] == "z^-2(z^6+3z^4+3z^2+5)"
    assert r["multiplicity_enumerator"]["unit_circle_zero"] is None
    assert r["periodicity"]["periodic"]


def test_scan_p2(capsys, gfile):
    code, out, _ = run(capsys, "scan", gfile(path(2)), 0, 1, 0, "pi", 1000)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,magnitude,phase"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:] if not ln.startswith("#")]
    assert len(rows) >= 1000
    t, m, _ = max(rows, key=lambda r: r[1])
    assert abs(t - 1.5708) < 1e-3 and f"{m:.9f}" == "1.000000000"
    footer = [ln for ln in lines if ln.startswith("# maximum")]
    assert footer and "1.000000000000" in footer[0]
    assert any(ln.startswith("# certificate") for ln in lines)


def test_scan_p3_and_c5(capsys, gfile):
    from pstlab.graph import cycle

    out = run(capsys, "scan", gfile(path(3)), 0, 2, 0, 3, 1000)[1]
    maxima = [ln for ln in out.splitlines() if ln.startswith("# maximum")]
    t = float(maxima[0].split("t=")[1].split()[0])
    assert t == pytest.approx(math.pi / math.sqrt(2), abs=1e-9)
    out = run(capsys, "scan", gfile(cycle(5)), 0, 2, 0, "2*pi", 1000)[1]
    mags = [float(ln.split(",")[1]) for ln in out.splitlines()[1:] if not ln.startswith("#")]
    assert max(mags) < 1
    assert "# certificate" not in out


def test_scan_errors(capsys, gfile):
    f = gfile(path(3))
    assert run(capsys, "scan", f, 0, 0, 0, 1, 100)[0] == 2
    assert run(capsys, "scan", f, 0, 0, 0, 1, 100, "--periodicity")[0] == 0
    assert run(capsys, "scan", f, 0, 9, 0, 1, 100)[0] == 2
    assert run(capsys, "scan", f, 0, 1, 1, 1, 100)[0] == 2
    assert run(capsys, "scan", f, 0, 1, 0, 1, 1)[0] == 2


def test_scan_labels(capsys, tmp_path):
    xh = tmp_path / "xh.json"
    run(capsys, "construct", "xh-from-hadamard", "base4", "-o", xh)
    out = run(capsys, "scan", xh, "(1,0)", "(1,1)", 0, "pi", 200)[1]
    assert "# certificate" in out


def test_mu(capsys, gfile, tmp_path):
    r = json.loads(run(capsys, "mu", gfile(hypercube(3)))[1])
    assert r["unit_circle_zero"]["im"] == 1.0 and r["walk_regular"]
    r = json.loads(run(capsys, "mu", gfile(path(2)))[1])
    assert r["unit_circle_zero"] == {"re": 0.0, "im": 1.0, "t": pytest.approx(math.pi / 2)}
    f = tmp_path / "counterexample.spec"
    f.write_text(COUNTEREXAMPLE)
    r = json.loads(run(capsys, "mu", f, "--spectrum-only")[1])
    assert r["unit_circle_zero"] is None and r["verdict"].startswith("no unit-circle zero")
    code, _, err = run(capsys, "mu", gfile(path(3)))
    assert code == 2 and "all-integer" in err


def test_entry_points(tmp_path):
    f = tmp_path / "p2.g6"
    f.write_text(serialize_graph6(path(2)) + "\n")
    a = subprocess.run([sys.executable, "-m", "pstlab", "mu", str(f)], capture_output=True, text=True)
    assert a.returncode == 0 and json.loads(a.stdout)["schema"] == SCHEMA
    b = subprocess.run([sys.executable, "-m", "pstlab", "construct", "path", "0"], capture_output=True, text=True)
    assert b.returncode == 2
