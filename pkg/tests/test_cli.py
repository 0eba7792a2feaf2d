import json
import math
from fractions import Fraction

import numpy as np
import pytest

from gaussimage.cli import run
from gaussimage.io import dump_json


@pytest.fixture
def files(tmp_path):
    def put(name, data):
        p = tmp_path / name
        dump_json(data, p)
        return str(p)

    cube = [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    return {
        "cube": put("cube.json", {"vertices": cube}),
        "cube2x": put("cube2x.json", {"vertices": [[2 * c for c in v] for v in cube]}),
        "cross": put("cross.json", {"vertices": [list(s * e) for s in (1, -1) for e in np.eye(3)]}),
        "uniform": put("uniform.json", {"kind": "uniform"}),
        "atoms": put("atoms.json", {"kind": "atoms", "atoms": [{"dir": [0, 0, 1], "w": 1},
                                                               {"dir": [0, 0, -1], "w": 1}]}),
        "square": put("square_e3.json", {"polygons": [[[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]]]}),
        "bad": put("bad.json", {"vertices": [[0, 0, 0], [1, 0, 0]]}),
        "dir": tmp_path,
    }


def report(tmp, argv):
    out = tmp / "rep.json"
    code = run(argv + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def vertex_set(rep):
    data = rep.get("result", rep)
    return np.array([[float(eval_frac(x)) for x in v] for v in data["vertices"]])


def eval_frac(x):
    return Fraction(x) if isinstance(x, str) else x


def test_polar_of_cube(files):
    code, rep = report(files["dir"], ["polar", "--k", files["cube"]])
    assert code == 0 and rep["verdict"] == "pass"
    V = vertex_set(rep)
    expect = np.vstack([np.eye(3), -np.eye(3)])
    assert len(V) == 6 and all(np.min(np.linalg.norm(V - e, axis=1)) < 1e-12 for e in expect)


def test_uniqueness_check_dilate_pair(files):
    code, rep = report(files["dir"], ["uniqueness-check", "--k", files["cube"], "--l", files["cube2x"],
                                      "--lambda", files["uniform"], "--seed", "7"])
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["check"] == "ae-equality" and rep["config"]["seed"] == 7


def test_uniqueness_check_failure_and_csv(files):
    csv = files["dir"] / "rows.csv"
    code, rep = report(files["dir"], ["uniqueness-check", "--k", files["cube"], "--l", files["cross"],
                                      "--lambda", files["uniform"], "--csv", str(csv)])
    assert code == 1 and rep["verdict"] == "fail" and rep["witnesses"]
    lines = csv.read_text().splitlines()
    assert lines[0] == "set,m,s,exact" and len(lines) > 1


def test_lipschitz_scan_short_with_csv(files):
    csv = files["dir"] / "scan.csv"
    code, rep = report(files["dir"], ["lipschitz-scan", "--k", files["cube"], "--l", files["cross"],
                                      "--omega", files["square"], "--t-count", "10", "--csv", str(csv)])
    assert code == 0
    rows = csv.read_text().splitlines()
    assert rows[0] == "t,d_H,ratio,bound" and len(rows) == 10
    assert max(float(r.split(",")[2]) for r in rows[1:]) <= 4 * math.sqrt(3)


def test_dilation_check_exit_codes(files):
    code, rep = report(files["dir"], ["dilation-check", "--k", files["cube"], "--l", files["cube2x"],
                                      "--lambda", files["atoms"]])
    assert code == 0 and rep["margins"]["ratios"] == {"atom-0": 0.5, "atom-1": 0.5}
    code, rep = report(files["dir"], ["dilation-check", "--k", files["cube"], "--l", files["cross"],
                                      "--lambda", files["uniform"]])
    assert code == 1 and rep["witnesses"][0]["set"] == "hypothesis"


def test_bad_inputs_exit_two(files, capsys):
    assert run(["polar", "--k", files["bad"]]) == 2
    assert run(["polar", "--k", str(files["dir"] / "missing.json")]) == 2
    assert run(["polar"]) == 2
    assert run(["harmonic", "--k", files["cube"], "--l", files["cube"], "--t", "2"]) == 2


def test_generate_examples(files):
    for kind, n in (("cube", 8), ("frustum", 8), ("cross", 6)):
        out = files["dir"] / f"{kind}.json"
        assert run(["generate", "--kind", kind, "--out", str(out)]) == 0
        assert len(json.loads(out.read_text())["vertices"]) == n
    a, b = files["dir"] / "r1.json", files["dir"] / "r2.json"
    for p in (a, b):
        assert run(["generate", "--kind", "random", "--m", "30", "--seed", "1", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_reports_are_byte_identical(files):
    outs = []
    for i in range(2):
        out = files["dir"] / f"rep{i}.json"
        run(["ratio-partition", "--k", files["cube"], "--l", files["cube2x"], "--seed", "3",
             "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("mode", ["float", "rational"])
def test_generate_polar_polar_round_trip(files, mode):
    d = files["dir"]
    paths = [d / f"{mode}-{k}.json" for k in range(3)]
    assert run(["generate", "--kind", "random", "--seed", "5", "--mode", mode, "--out", str(paths[0])]) == 0
    assert run(["polar", "--k", str(paths[0]), "--mode", mode, "--out", str(paths[1])]) == 0
    assert run(["polar", "--k", str(paths[1]), "--mode", mode, "--out", str(paths[2])]) == 0
    first = json.loads(paths[0].read_text())
    last = json.loads(paths[2].read_text())["result"]
    if mode == "rational":
        assert sorted(first["vertices"]) == sorted(last["vertices"])
    else:
        A, B = vertex_set(first), vertex_set(last)
        assert len(A) == len(B)
        assert np.linalg.norm(A[:, None] - B[None], axis=2).min(axis=1).max() <= 1e-7


def test_measure_and_harmonic(files):
    code, rep = report(files["dir"], ["measure", "--k", files["cube"], "--lambda", files["uniform"],
                                      "--omega", files["square"]])
    assert code == 0 and rep["result"]["mass"] == pytest.approx(2 * math.pi, abs=1e-9)
    code, rep = report(files["dir"], ["harmonic", "--k", files["cube"], "--l", files["cube2x"],
                                      "--t", "1/2", "--mode", "rational"])
    assert code == 0
    assert sorted(set(abs(eval_frac(x)) for v in rep["result"]["vertices"] for x in v)) == [eval_frac("4/3")]
