import hashlib
import json
import subprocess
import sys

import pytest

from mcbrot.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_member(capsys):
    code, out, _ = call(capsys, "member", "--p", "2", "--n", "3", "--c", "0.1+0.2*i1")
    assert code == 0 and out.splitlines()[0] == "bounded"
    code, out, _ = call(capsys, "member", "--p", "2", "--c", "0.3")
    assert out.startswith("escaped at iteration")


def test_member_json(capsys):
    code, out, _ = call(capsys, "member", "--c", "-2", "--json")
    rec = json.loads(out)
    assert rec["status"] == "bounded" and rec["direct_status"] == "bounded"


def test_axis(capsys):
    code, out, _ = call(capsys, "axis", "--p", "2")
    assert code == 0 and out.splitlines()[0] == "[-2.000, 0.250]"


def test_classify(capsys):
    code, out, _ = call(capsys, "classify", "--n", "3", "--p", "2")
    assert code == 0 and out.startswith("8 classes")
    assert "Airbrot" in out
    code, out, _ = call(capsys, "classify", "--n", "4", "--p", "2", "--json")
    recs = [json.loads(l) for l in out.splitlines()]
    assert len(recs) == 9 and sum(r["count"] for r in recs) == 560
    assert sum(r["marginal"] for r in recs) == 1


def test_canon(capsys):
    code, out, _ = call(capsys, "canon", "--triple", "i2,i4,i2i4", "--p", "2")
    assert code == 0 and "representative: {i1, i2, i1i2}" in out
    code, out, _ = call(capsys, "canon", "--triple", "i1i2,i1i3,i1i4", "--p", "2")
    assert "marginal octahedron" in out


def test_dims(capsys):
    code, out, _ = call(capsys, "dims", "--n", "3", "--p", "2")
    assert code == 0 and "56/56 pass" in out
    code, out, _ = call(capsys, "dims", "--triple", "i1,i2,i3", "--p", "2", "--json")
    assert json.loads(out)["rank"] == 8


def test_octa(capsys):
    code, out, _ = call(capsys, "octa", "--p", "2", "--res", "17")
    assert code == 0 and out.splitlines()[-1] == "pass"


def test_verify(capsys):
    code, out, _ = call(capsys, "verify", "--suite", "algebra")
    assert code == 0 and "FAIL" not in out


def test_render_files(capsys, tmp_path):
    args = ["render", "--res", "9", "--bounds=-2.2:0.5,-1.3:1.3,-1.3:1.3"]
    paths = {k: tmp_path / f"g.{k}" for k in ("mbv", "obj", "csv")}
    code, out, _ = call(
        capsys, *args, "--out", str(paths["mbv"]), "--obj", str(paths["obj"]), "--csv", str(paths["csv"])
    )
    assert code == 0
    assert paths["mbv"].stat().st_size == 69 + 2 * 9**3
    assert paths["csv"].read_text().startswith("x,y,z,count\n")


def test_render_deterministic(capsys, tmp_path):
    digests = []
    for threads in ("1", "3"):
        path = tmp_path / f"t{threads}.mbv"
        assert call(capsys, "render", "--res", "13", "--threads", threads, "--out", str(path))[0] == 0
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_same_argv_same_stdout(capsys):
    a = call(capsys, "classify", "--n", "4", "--p", "3")
    b = call(capsys, "classify", "--n", "4", "--p", "3")
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["member"],
        ["member", "--c", "1 +"],
        ["member", "--c", "i1", "--frobnicate"],
        ["render", "--res", "1,2"],
        ["render", "--bounds", "0:1"],
        ["render", "--res", "1"],
        ["canon"],
        ["canon", "--triple", "i1,i1,i2"],
        ["classify", "--n", "7"],
        ["axis", "--p", "1"],
        ["verify", "--suite", "nope"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and "usage" in err


def test_help(capsys):
    code, out, _ = call(capsys, "--help")
    assert code == 0 and "render" in out


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "mcbrot", "axis", "--p", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("[-2.000, 0.250]")
