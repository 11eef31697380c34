"""CLI behaviour; every subprocess run is executed twice and compared byte for byte."""

import json
import os
import subprocess
import sys


from derived_tame import cli
from derived_tame.corpus import data_path

RUNS = []


def run_cli(*args, tmp=None):
    """Run the CLI in two fresh interpreters; return (code, stdout, stderr) of the first."""
    env = dict(os.environ)
    outs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "derived_tame", *map(str, args)],
                              capture_output=True, env=env, cwd=tmp)
        outs.append((proc.returncode, proc.stdout, proc.stderr))
    RUNS.append((args, outs[0] == outs[1]))
    assert outs[0] == outs[1], f"non-deterministic output for {args}"
    return outs[0]


def report(out: bytes) -> dict:
    return json.loads(out.decode())


def test_algebra_inspect_json():
    code, out, _ = run_cli("algebra", "inspect", data_path("cubic.alg"), "--json")
    assert code == 0
    r = report(out)
    assert r["tool"] == "derived-tame" and r["subcommand"] == "algebra inspect"
    assert list(r["inputs"]) == ["cubic.alg"]
    assert r["payload"]["dim"] == 3


def test_algebra_inspect_text():
    code, out, _ = run_cli("algebra", "inspect", data_path("dual.alg"))
    assert code == 0 and b"dim" in out


def test_box_build_census():
    code, out, _ = run_cli("box", "build", data_path("a2.alg"), "--window", "0..2", "--json")
    assert code == 0
    assert report(out)["payload"]["census"] == {"objects": 6, "arrows": 2, "relations": 0}


def test_box_build_empty_window():
    code, _, err = run_cli("box", "build", data_path("dual.alg"), "--window", "2..1")
    assert code == 1 and report(err)["error"]["kind"] == "BoxError"


def test_complex_commands():
    path = data_path("dual_x.json")
    code, out, _ = run_cli("complex", "check", path, "--json")
    assert code == 0 and report(out)["payload"]["dsquared"] == "ok"
    code, out, _ = run_cli("complex", "homology", path, "--json")
    assert report(out)["payload"]["homology"] == {"0": [1], "1": [1]}
    code, out, _ = run_cli("complex", "iso", path, path, "--json")
    assert code == 0 and report(out)["payload"]["isomorphic"] is True
    code, out, _ = run_cli("complex", "minimalize", data_path("dual_split.json"), "--json")
    assert code == 0 and not any(map(any, report(out)["payload"]["homology"].values()))


def test_par_estimate_dual():
    code, out, _ = run_cli("par", "estimate", data_path("dual.alg"), "--ranks", "1;1;1",
                           "--field", "F3", "--json")
    assert code == 0
    payload = report(out)["payload"]
    assert payload["estimate"]["lo"] == payload["estimate"]["hi"] == 0


def test_par_estimate_semisimple():
    code, out, _ = run_cli("par", "estimate", data_path("kxk.alg"), "--ranks", "1,1;1,1",
                           "--field", "F2", "--json")
    assert code == 0 and report(out)["payload"]["estimate"]["lo"] == 0


def test_par_estimate_infeasible():
    code, _, err = run_cli("par", "estimate", data_path("brustle_A0.alg"), "--field", "F3",
                           "--ranks", "1,1,1,1,1,1;1,1,1,1,1,1", "--cap", "100")
    assert code == 2 and report(err)["error"]["kind"] == "infeasible"


def test_family_commands():
    fam = data_path("x2_family.fam")
    code, out, _ = run_cli("family", "dims", data_path("brustle.fam"), "--grid", "0..3", "--json")
    dims = report(out)["payload"]["dims"]
    assert dims["0"] == 16 and {dims[k] for k in ("1", "2", "3")} == {15}
    code, out, _ = run_cli("family", "parscan", fam, "--ranks", "1;1", "--grid", "0..10", "--json")
    payload = report(out)["payload"]
    assert set(payload["par"].values()) == {0} and payload["semicontinuous"] is True


def test_brustle_demo():
    code, out, _ = run_cli("brustle", "demo", "--json")
    payload = report(out)["payload"]
    assert code == 0
    assert payload["dims"]["0"] == 16 and payload["dims"]["1"] == 15
    assert payload["flat_limit"]["dim"] == 15


def test_parse_error_location(tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("name: bad\nfield: Q\nvertices: 1\narrows:\n  x: 1 -> 1\nrelations:\n  x*y\nbound: 2\n")
    code, _, err = run_cli("algebra", "inspect", bad)
    r = report(err)
    assert code == 1 and r["error"]["kind"] == "parse"
    assert r["error"]["line"] == 7 and r["error"]["col"] >= 3


def test_missing_file():
    code, _, err = run_cli("algebra", "inspect", "no-such-file.alg")
    assert code == 1 and "error" in report(err)


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run_cli("algebra", "inspect", data_path("dual.alg"), "--out", out)
    assert code == 0 and report(out.read_bytes())["payload"]["dim"] == 2 and stdout


def test_invariant_violation_exit_code(monkeypatch, capsys):
    from derived_tame.algebra import AlgebraData
    monkeypatch.setattr(AlgebraData, "check_invariants", lambda self: ["forced failure"])
    code = cli.main(["algebra", "inspect", str(data_path("dual.alg"))])
    assert code == 3
    assert json.loads(capsys.readouterr().err)["error"]["kind"] == "invariant"


def test_every_run_was_deterministic():
    assert RUNS and all(ok for _, ok in RUNS)
