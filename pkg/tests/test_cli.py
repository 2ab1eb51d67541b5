import json
import subprocess
import sys

import pytest

from bethepop.cli import run

A2_FLAGS = ["--type", "A2", "--family", "trig", "--Lambda", "1,0", "--z", "1", "--weight", "1/3,2/7"]
SEED = {"type": "A1", "family": "trig", "Lambda": [["1/1"]], "z": ["1/1"], "lambda": ["5/3"], "tuple": [["−5/8", "1/1"]]}


def _run(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None), out


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_populate_a2_trivial(capsys):
    code, report, _ = _run(["populate", *A2_FLAGS], capsys)
    assert code == 0 and report["pass"]
    assert len(report["nodes"]) == 6
    assert all(report["checks"].values())


def test_populate_seed_problem_file(tmp_path, capsys):
    code, report, _ = _run(["populate", _write(tmp_path, "seed.json", SEED)], capsys)
    assert code == 0
    weights = {tuple(n["weight"]) for n in report["nodes"]}
    assert weights == {("5/3",), ("-11/3",)}


def test_round_trip_populate_verify(tmp_path, capsys):
    dump = tmp_path / "pop.json"
    assert run(["populate", *A2_FLAGS, "-o", str(dump)]) == 0
    code, report, _ = _run(["verify", str(dump)], capsys)
    assert code == 0
    assert all(row["critical"] for row in report["nodes"]) and len(report["nodes"]) == 6
    assert all(row["ok"] for row in report["edges"])


def test_verify_rejects_corrupted_tuple(tmp_path, capsys):
    dump = tmp_path / "pop.json"
    assert run(["populate", *A2_FLAGS, "-o", str(dump)]) == 0
    data = json.loads(dump.read_text())
    data["nodes"][2]["tuple"][0][0] = "7/5"
    code, report, _ = _run(["verify", _write(tmp_path, "bad.json", data)], capsys)
    assert code == 1 and not report["pass"]
    bad = dict(SEED, tuple=[["-1/2", "1/1"]])
    code, _, _ = _run(["verify", _write(tmp_path, "bad_seed.json", bad)], capsys)
    assert code == 1


def test_verify_seed_passes(tmp_path, capsys):
    code, report, _ = _run(["verify", _write(tmp_path, "seed.json", SEED)], capsys)
    assert code == 0 and report["critical"]


def test_input_errors_exit_2(tmp_path, capsys):
    assert run(["verify", str(tmp_path / "missing.json")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert run(["populate", str(broken)]) == 2
    assert run(["populate", _write(tmp_path, "nokey.json", {"type": "A2"})]) == 2
    assert run(["populate", _write(tmp_path, "badrat.json", dict(SEED, z=["x/y"]))]) == 2
    assert run(["populate", "--type", "A2", "--Lambda", "1,0", "--z", "1", "--weight", "1/3"]) == 2
    assert run(["populate", *A2_FLAGS[:-1], "1,2/7"]) == 2  # integral weight is not generic
    assert run(["nonsense"]) == 2
    capsys.readouterr()


def test_overflow_exit_1(monkeypatch, capsys):
    monkeypatch.setenv("BETHE_MAX_NODES", "3")
    code, report, _ = _run(["populate", *A2_FLAGS], capsys)
    assert code == 1 and "overflow" in report["error"]


def test_reports_are_deterministic(capsys):
    argv = ["solve", "--type", "A1", "--Lambda", "1", "--Lambda", "1", "--z", "1,2", "--weight", "3/7", "--l", "1", "--seed", "3", "--attempts", "40"]
    _, first, a = _run(argv, capsys)
    _, _, b = _run(argv, capsys)
    assert a == b
    assert first["count_check"]["equal"]
    _, _, c = _run(["populate", *A2_FLAGS], capsys)
    _, _, d = _run(["populate", *A2_FLAGS], capsys)
    assert c == d


def test_check_subcommands(tmp_path, capsys):
    assert run(["kernel-check", "--type", "A3", "--Lambda", "1,0,0", "--z", "1", "--weight", "1/3,2/7,3/11"]) == 0
    assert run(["kernel-check", "--type", "A2", "--family", "xxx", "--h", "1", "--Lambda", "1,0", "--z", "1/7", "--weight", "2,3"]) == 0
    assert run(["kernel-check", "--type", "B2", "--Lambda", "1,0", "--z", "1", "--weight", "1/3,2/7"]) == 2
    assert run(["fold-check", "--type", "B2", "--Lambda", "1,0", "--z", "1", "--weight", "1/3,2/7"]) == 0
    sl2 = ["--type", "A1", "--Lambda", "1", "--Lambda", "1", "--z", "1,2"]
    assert run(["gaudin-check", *sl2, "--weight", "3/7", "--l", "1", "--attempts", "60"]) == 0
    assert run(["dwg-check", *sl2, "--l", "1", "--lam", "10", "--attempts", "60"]) == 0
    capsys.readouterr()


def test_module_entry_point(tmp_path):
    path = _write(tmp_path, "seed.json", SEED)
    proc = subprocess.run([sys.executable, "-m", "bethepop", "verify", path], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["pass"]
