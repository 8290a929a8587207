from __future__ import annotations

import json
import subprocess
import sys

import pytest

from twisted_chevalley.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rootsys(capsys):
    code, out, _ = _run(capsys, "rootsys", "--type", "A3")
    assert code == 0
    lines = out.splitlines()
    assert "rho (1 3)(2)" in lines
    assert "roots 12" in lines
    assert sum(line.startswith("class ") for line in lines) == 8


def test_constants_lines(capsys):
    code, out, _ = _run(capsys, "constants", "--type", "A4", "--twist", "standard")
    assert code == 0
    eps = [line.split() for line in out.splitlines() if line.startswith("eps ")]
    assert len(eps) == 20
    minus = sorted(line[1] for line in eps if line[2] == "-1")
    assert minus == ["(-1,-1,-1,-1)", "(0,-1,-1,0)", "(0,1,1,0)", "(1,1,1,1)"]
    for line in out.splitlines():
        if line.startswith("N "):
            assert line.split()[3] in ("+1", "-1")


def test_constants_json_mirrors_text(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, out, _ = _run(capsys, "constants", "--type", "A3", "--json", str(path))
    data = json.loads(path.read_text())
    assert code == 0
    assert len(data["N"]) == sum(line.startswith("N ") for line in out.splitlines())
    assert {e for _, e in data["eps"]} == {1}


def test_twistedbasis(capsys):
    code, out, _ = _run(capsys, "twistedbasis", "--type", "A3", "--ring", "gf(3,1)")
    assert code == 0
    assert out.splitlines()[-1] == "elements 15"


def test_generators_matrix(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, out, _ = _run(capsys, "generators", "--type", "A4", "--class", "0,1,0,0", "--param", "t=1", "u=1/2", "--json", str(path))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("class [0,1,0,0] A2")
    assert len(lines) == 1 + 24
    assert json.loads(path.read_text())["u"] == "1/2"


@pytest.mark.parametrize(
    "argv",
    [
        ["rootsys", "--type", "B2"],
        ["verify", "--type", "A3", "--ring", "gf(2,1)"],
        ["verify", "--type", "A3", "--ring", "rationals"],
        ["verify", "--type", "A3", "--ring", "nonsense("],
        ["verify", "--type", "A4", "--ring", "gf(3,1)", "--suite", "tangent"],
        ["generators", "--type", "A4", "--class", "0,1,0,0", "--param", "t=1", "u=1"],
        ["generators", "--type", "A3", "--class", "1,0"],
        ["verify", "--suite", "normalizer", "--ext", "rationals"],
        ["constants", "--twist", "other"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2
    assert "usage error:" in err


def test_unwritable_json_exits_3(capsys, tmp_path):
    code, _, err = _run(capsys, "rootsys", "--json", str(tmp_path / "missing" / "out.json"))
    assert code == 3
    assert "cannot write" in err


def test_verify_tangent_passes(capsys):
    code, out, _ = _run(capsys, "verify", "--type", "A3", "--ring", "gaussian-rationals", "--suite", "tangent")
    assert code == 0
    assert out.splitlines()[-1].startswith("tangent: ")
    assert all(line.startswith("PASS") for line in out.splitlines()[:-1])


def test_verify_generation_reports_dimension(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = _run(capsys, "verify", "--type", "A3", "--ring", "gf(3,1)", "--suite", "generation", "--json", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    (check,) = data["checks"]
    assert check["witness"]["dimension"] == 225
    assert data["decisions"]["sign fix"]


@pytest.mark.parametrize("suite", ["tangent", "generation", "recovery", "normalizer"])
def test_mutation_hook_exits_1(capsys, suite):
    code, out, _ = _run(capsys, "verify", "--type", "A3", "--suite", suite, "--samples", "3", "--mutate", "all")
    assert code == 1
    assert any(line.startswith("FAIL") for line in out.splitlines())


def test_verify_json_is_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        code, _, _ = _run(capsys, "verify", "--type", "A3", "--suite", "normalizer", "--samples", "5", "--seed", "9", "--json", str(path))
        assert code == 0
    a, b = (json.loads(p.read_text()) for p in paths)
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b


def test_module_entry_point_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "twisted_chevalley", "rootsys", "--type", "D4"], capture_output=True, text=True)
    assert ok.returncode == 0 and "roots 24" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "twisted_chevalley", "verify", "--type", "A3", "--suite", "recovery", "--mutate", "all"], capture_output=True, text=True)
    assert bad.returncode == 1
