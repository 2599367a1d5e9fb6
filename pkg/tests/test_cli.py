import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from hrdlha.cli import run
from hrdlha.core import Bound, normalize_expression
from hrdlha.engine import semantically_equal
from hrdlha.frontend import generate_fischer, parse_pred
from hrdlha.normalize import normalize
from hrdlha.wp import SymbolicModel


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def fischer2_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("models") / "fischer2.lha"
    code, _, _ = call("--generate", "fischer:2", "-o", str(path))
    assert code == 0
    return path


def test_analyze_text(fischer2_file):
    code, out, _ = call("analyze", str(fischer2_file), "--ordering", "coefficient", "--pspsc")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "status: converged"
    assert lines[1] == "unsafe: (-11*A + 8*B <= 0 and -A <= 0)"


def test_solutions_are_complement(fischer2_file):
    code, out, _ = call("analyze", str(fischer2_file), "--output", "json")
    doc = json.loads(out)
    sm = SymbolicModel(generate_fischer(2))
    mgr = sm.mgr
    unsafe, sols = region_from_json(sm, doc["unsafe"]), region_from_json(sm, doc["solutions"])
    want = sm.pred(parse_pred("-11*A + 8*B <= 0 and -A <= 0"))
    assert semantically_equal(mgr, unsafe, want)
    assert semantically_equal(mgr, sols, mgr.complement(want))


def region_from_json(sm, dnf):
    mgr = sm.mgr
    out = []
    for conj in dnf:
        cons = []
        for c in conj:
            e, g = normalize_expression({sm.var_id[v]: a for v, a in c["expression"].items()})
            b = F(c["bound"]) / g
            cons.append((e, Bound(b, c["relation"] == "<=")))
        out.append(mgr.conj(cons))
    return mgr.union_all(out)


def region_from_text(sm, text):
    return normalize(sm.mgr, sm.pred(parse_pred(text)))


@pytest.mark.parametrize("extra", [(), ("--direction", "forward"), ("--ordering", "magnitude", "--pspsc")])
def test_text_and_json_agree(fischer2_file, extra):
    _, text, _ = call("analyze", str(fischer2_file), *extra)
    _, js, _ = call("analyze", str(fischer2_file), "--output", "json", *extra)
    doc = json.loads(js)
    sm = SymbolicModel(generate_fischer(2))
    fields = dict(line.split(": ", 1) for line in text.splitlines())
    assert fields["status"] == doc["status"]
    for key in ("unsafe", "solutions"):
        a = region_from_text(sm, fields[key])
        b = region_from_json(sm, doc[key])
        assert semantically_equal(sm.mgr, a, b), key


def test_json_shape(fischer2_file):
    _, js, _ = call("analyze", str(fischer2_file), "--output", "json")
    doc = json.loads(js)
    assert set(doc) == {"status", "direction", "ordering", "pspsc", "parameters", "unsafe", "solutions"}
    assert doc["parameters"] == ["A", "B"]
    for conj in doc["unsafe"] + doc["solutions"]:
        for c in conj:
            assert c["relation"] in ("<", "<=")
            assert all(isinstance(v, int) for v in c["expression"].values())
            F(c["bound"])
    _, js, _ = call("analyze", str(fischer2_file), "--output", "json", "--stats")
    stats = json.loads(js)["stats"]
    assert stats["iterations"] > 0 and stats["peak_nodes"] > 0


def test_generate_then_analyze_is_byte_identical(fischer2_file):
    _, from_file, _ = call("analyze", str(fischer2_file), "--output", "json")
    _, builtin, _ = call("analyze", "builtin:fischer:2", "--output", "json")
    assert from_file == builtin


def test_generate_stdout():
    code, out, _ = call("--generate", "railroad:2")
    assert code == 0 and "param CUTOFF;" in out


def test_exit_codes(tmp_path):
    assert call("analyze", str(tmp_path / "missing.lha"))[0] == 2
    bad = tmp_path / "bad.lha"
    bad.write_text("process {")
    code, _, err = call("analyze", str(bad))
    assert code == 2 and "1:" in err
    invalid = tmp_path / "invalid.lha"
    invalid.write_text("process p { mode a { } } initially true; risk p@zz;")
    assert call("analyze", str(invalid))[0] == 2
    code, _, err = call("analyze", "builtin:fischer:6", "--max-iterations", "1")
    assert code == 3
    assert call()[0] == 1
    assert call("analyze")[0] == 1
    assert call("analyze", "x.lha", "--ordering", "nope")[0] == 1
    assert call("analyze", "x.lha", "--max-iterations", "-2")[0] == 1
    assert call("--generate", "nosuch:2")[0] == 1


def test_stats_stream():
    code, out, err = call("analyze", "builtin:fischer:2", "--stats")
    assert code == 0
    assert err.splitlines()[0].startswith("iteration 0 frontier_paths")
    assert "iterations:" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hrdlha", "analyze", "builtin:fischer:2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "unsafe: (-11*A + 8*B <= 0 and -A <= 0)" in proc.stdout
