import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ribaucour.cli import main
from ribaucour.verify import ELLIPSOID, I2_MU


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def indices(report):
    return {r["flow"]: r["index"]["num"] / r["index"]["den"] for r in report["indices"]}


def test_analyze_rezpow4_euclid(capsys):
    code, out, _ = run(capsys, "analyze", "--mu", "rezpow(4)", "--kind", "euclid",
                       "--radius", "0.5")
    assert code == 0
    rep = json.loads(out)
    assert indices(rep) == {"eigen1": -1, "eigen2": -1}
    assert rep["center"]["classification"] == "Umbilic"
    assert rep["indices"][0]["index"] == {"num": -2, "den": 2}


def test_analyze_i2_timelike(capsys):
    code, out, err = run(capsys, "analyze", "--mu", I2_MU, "--kind", "timelike")
    assert code == 0
    got = indices(json.loads(out))
    assert got == {"null1": -1, "null2": 1, "thmE": 0,
                   "null1_perp": 1, "null2_perp": -1, "thmE_perp": 0}
    assert "quasi-umbilic" in err and "45.0" in err


def test_analyze_is_deterministic(capsys):
    argv = ["analyze", "--mu", "rezpow(3)", "--kind", "spacelike", "--radius", "0.3"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_analyze_params_echoed(capsys):
    code, out, _ = run(capsys, "analyze", "--mu", "a*rezpow(3)", "--param", "a=2",
                       "--kind", "euclid", "--radius", "0.3")
    rep = json.loads(out)
    assert code == 0 and rep["input"]["params"] == {"a": 2.0}
    assert indices(rep)["eigen1"] == -0.5


@pytest.mark.parametrize("argv", [
    ["analyze", "--mu", "xi", "--kind", "euclid", "--radius", "0"],
    ["analyze", "--mu", "xi+", "--kind", "euclid"],
    ["analyze", "--mu", "a*xi", "--kind", "euclid"],
    ["analyze", "--mu", "xi", "--kind", "euclid", "--param", "a"],
    ["analyze", "--mu", "xi", "--kind", "minkowski"],
    ["flow", "--mu", I2_MU, "--kind", "timelike", "--flow", "bogus", "--out", "x.svg"],
    ["flow", "--mu", I2_MU, "--kind", "euclid", "--flow", "null1", "--out", "x.svg"],
    ["mesh", "--mu", "0", "--kind", "euclid", "--out", "x.obj", "--bbox", "1,0,0,1"],
    ["verify-paper", "--only", "nosuchtag"],
    [],
])
def test_usage_errors_exit_2(capsys, argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error")


def test_flow_null1_writes_svg(capsys, tmp_path):
    out = tmp_path / "i2.svg"
    code, _, _ = run(capsys, "flow", "--mu", I2_MU, "--kind", "timelike", "--flow", "null1",
                     "--out", str(out), "--max-points", "80")
    assert code == 0
    root = ET.parse(out).getroot()
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 24


def test_flow_thmE_and_glued(capsys, tmp_path):
    for flow in ("thmE", "glued:null2@225:315;null1"):
        out = tmp_path / "f.svg"
        code, _, _ = run(capsys, "flow", "--mu", I2_MU, "--kind", "timelike", "--flow", flow,
                         "--out", str(out), "--max-points", "40")
        assert code == 0 and out.stat().st_size > 0


def test_flow_numerical_failures_exit_3(capsys, tmp_path):
    out = str(tmp_path / "x.svg")
    code, _, err = run(capsys, "flow", "--mu", "rejpow(5)", "--kind", "timelike",
                       "--flow", "null1", "--out", out)
    assert code == 3 and "FieldUndefined" in err
    code, _, err = run(capsys, "flow", "--mu", I2_MU, "--kind", "timelike",
                       "--flow", "glued:null2@0:90;null1", "--out", out)
    assert code == 3 and "DiscontinuousGlue" in err


def test_analyze_failure_exit_3(capsys):
    code, out, err = run(capsys, "analyze", "--mu", "rejpow(5)", "--kind", "timelike")
    assert code == 3 and out == "" and "flow null1" in err and "UndefinedOnCircle" in err


def _obj_vertices(path):
    return np.array([[float(t) for t in line.split()[1:]]
                     for line in path.read_text().splitlines() if line.startswith("v ")])


def test_mesh_planar(capsys, tmp_path):
    out = tmp_path / "plane.obj"
    code, _, _ = run(capsys, "mesh", "--mu", "0", "--kind", "spacelike", "--out", str(out),
                     "--n", "6")
    V = _obj_vertices(out)
    assert code == 0 and len(V) == 36 and np.all(V[:, 2] == 0)


def test_mesh_ellipsoid_markers(capsys, tmp_path):
    out = tmp_path / "ell.obj"
    code, _, _ = run(capsys, "mesh", "--mu", ELLIPSOID, "--kind", "graph-spacelike",
                     "--out", str(out), "--bbox=-1.6,1.6,-0.6,0.6", "--n", "17",
                     "--markers")
    assert code == 0
    lines = out.read_text().splitlines()
    tail = lines[lines.index("# markers") + 1:]
    marks = np.array([[float(t) for t in l.split()[1:]] for l in tail if l.startswith("v ")])
    want = np.array([[-math.sqrt(1.5), 0, math.sqrt(2.5)], [math.sqrt(1.5), 0, math.sqrt(2.5)]])
    assert np.allclose(marks, want, atol=1e-9)


def test_mesh_timelike_skip_warning(capsys, tmp_path):
    code, _, err = run(capsys, "mesh", "--mu", "eta^2", "--kind", "graph-timelike",
                       "--out", str(tmp_path / "t.obj"), "--bbox=-1,1,-1,1", "--n", "11")
    assert code == 0 and "skipped" in err


def test_verify_only_tag(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "thmF")
    rows = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert code == 0 and len(rows) == 1 and rows[0].startswith("PASS 10")
