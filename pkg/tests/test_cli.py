import json
import shutil
import subprocess
import sys

import pytest

from khtangle import dataset
from khtangle.cli import RunConfig, InputError, main

DATA = dataset.DATA_DIR


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_zero_crossing_unknot(tmp_path, capsys):
    p = tmp_path / "u.json"
    p.write_text('{"crossings": [], "name": "unknot"}')
    code, out, _ = run(["kh", p, "--format", "json"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["homology"]["entries"] == [{"u": 0, "q": 0, "dim": 1}]
    assert obj["jones"] == "1" and obj["determinant"] == 1 and obj["thin"]


def test_kh_anchor(capsys):
    code, out, _ = run(["kh", DATA / "trefoil.tangle.json", "--level", "1", "--format", "json"], capsys)
    assert code == 0
    obj = json.loads(out)
    got = {(e["u"], e["q"]): e["dim"] for e in obj["homology"]["entries"]}
    want = {(u, q): n for u, q, n in dataset.read_rows(dataset.golden_path("kh_10_124"))}
    assert got == want
    assert obj["jones"] == "t^-4 + t^-6 - t^-10"
    assert not obj["thin"]


def test_kh_tsv_layout(capsys):
    code, out, _ = run(["kh", DATA / "trefoil.tangle.json", "--level", "1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert "q\\u\t-7\t-6\t-5\t-4\t-3\t-2\t-1\t0" in lines
    assert "jones\tt^-4 + t^-6 - t^-10" in lines


def test_closure_roundtrip(tmp_path, capsys):
    out_file = tmp_path / "c.json"
    assert run(["closure", DATA / "trefoil.tangle.json", "--level", "2", "-o", out_file], capsys)[0] == 0
    _, a, _ = run(["kh", out_file, "--format", "json"], capsys)
    _, b, _ = run(["kh", DATA / "trefoil.tangle.json", "--level", "2", "--format", "json"], capsys)
    assert json.loads(a)["homology"] == json.loads(b)["homology"]


def test_kappa_outputs(capsys):
    code, out, _ = run(["kappa", DATA / "trefoil.tangle.json"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1].split("\t") == ["2d\\u", "-5", "-4", "-3", "-2", "-1", "0"]
    assert lines[2].split("\t") == ["1", "1", ".", "1", "1", ".", "1"]
    assert "total\t4" in lines and "end_conditions\ttrue" in lines
    code, out, _ = run(["kappa", DATA / "unknot.tangle.json", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["total"] == 0


def test_kappa_figure_eight_two_rows(capsys):
    code, out, _ = run(["kappa", DATA / "figure8-h1.tangle.json"], capsys)
    rows = [ln.split("\t")[0] for ln in out.splitlines()[2:4]]
    assert code == 0 and rows == ["-1", "-3"]


def test_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["kappa", DATA / "figure8-h1.tangle.json", "--format", "json", "-o", p], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_malformed_input(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"crossings": [[1, 2, 3, 4]], "boundary": {"b0": 1, "b1": 2, "t0": 9, "t1": 4}}')
    out_file = tmp_path / "out.tsv"
    code, out, err = run(["kh", p, "--level", "0", "-o", out_file], capsys)
    assert code == 2
    assert "9" in err and "3" in err
    assert not out_file.exists() and out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ["kh", "missing.json", "--level", "1"],
        ["kh", DATA / "trefoil.tangle.json"],
        ["kh", DATA / "trefoil.tangle.json", "--level", "x"],
        ["kappa", DATA / "trefoil.tangle.json", "--window", "3:1"],
        ["kappa", DATA / "trefoil.tangle.json", "--cap", "10"],
    ],
)
def test_input_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_unknown_command(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_inadmissible_tangle(tmp_path, capsys):
    p = tmp_path / "turn.json"
    p.write_text('{"crossings": [], "boundary": {"b0": 1, "b1": 1, "t0": 2, "t1": 2}}')
    assert run(["kappa", p], capsys)[0] == 2


def test_resource_cap(tmp_path, capsys):
    out_file = tmp_path / "o.tsv"
    code, _, err = run(["kh", DATA / "trefoil.tangle.json", "--level", "20", "-o", out_file], capsys)
    assert code == 4 and "cap" in err
    assert not out_file.exists()
    code, _, _ = run(["kappa", DATA / "trefoil.tangle.json", "--window=-14:14"], capsys)
    assert code == 4


def test_unstabilized(tmp_path, capsys):
    out_file = tmp_path / "k.tsv"
    code, _, err = run(["kappa", DATA / "trefoil.tangle.json", "--window=-2:2", "-o", out_file], capsys)
    assert code == 3
    assert not out_file.exists()
    partial = tmp_path / "k.tsv.UNSTABILIZED"
    text = partial.read_text()
    assert text.startswith("# UNSTABILIZED")
    assert "end_conditions\tfalse" in text
    code, _, _ = run(["kappa", DATA / "trefoil.tangle.json", "--window=-2:2", "--format", "json", "-o", out_file], capsys)
    assert code == 3 and json.loads(partial.read_text())["status"] == "UNSTABILIZED"


def test_mirror_check(capsys):
    code, out, _ = run(["mirror-check", DATA / "trefoil.tangle.json"], capsys)
    assert code == 0 and out.startswith("verdict\tOBSTRUCTED")
    code, out, _ = run(["mirror-check", DATA / "figure8-h1.tangle.json", "--partner", DATA / "figure8-h2.tangle.json",
                        "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "SILENT"


def test_verify_soft_only(capsys):
    code, out, _ = run(["verify", "--soft-only"], capsys)
    assert code == 0
    assert "[PASS] 12" in out and "[PASS]  1" not in out


def test_verify_detects_corrupted_trefoil(tmp_path, capsys):
    data = tmp_path / "data"
    shutil.copytree(DATA, data)
    p = data / "trefoil.tangle.json"
    obj = json.loads(p.read_text())
    c = obj["crossings"][3]
    obj["crossings"][3] = c[1:] + c[:1]  # switch one crossing
    p.write_text(json.dumps(obj))
    code, out, _ = run(["verify", "--data", data], capsys)
    assert code == 1
    first = out.splitlines()[0]
    assert first.startswith("[FAIL]  1") and "cell (" in first


def test_run_config_invariants():
    with pytest.raises(InputError):
        RunConfig("kappa", window=(2, 2))
    with pytest.raises(InputError):
        RunConfig("kappa", cap=5)
    with pytest.raises(InputError):
        RunConfig("nope")
    assert RunConfig("verify").cap >= 24


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "khtangle", "kh", str(DATA / "unknot.tangle.json"), "--level", "inf"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "determinant\t1" in r.stdout
