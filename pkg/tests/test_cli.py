from __future__ import annotations

import json
import subprocess
import sys

import pytest

from infovalue.cli import main


def _run(*argv):
    return main([str(a) for a in argv])


def _read(path):
    return json.loads(path.read_text())


def test_analyze(tmp_path, data_dir, capsys):
    assert _run("analyze", data_dir / "tent.json", "--out", tmp_path, "--prior", "1/2") == 0
    rep = _read(tmp_path / "tent.subdivision.json")
    assert rep["cell_count"] == 3
    assert rep["prior"]["optimal"] == ["safe"] and rep["prior"]["value"] == "5/8"
    for name in ("tent.subdivision.svg", "tent.value.svg", "tent.value.csv"):
        assert (tmp_path / name).exists()
    assert "3 cell(s)" in capsys.readouterr().out


def test_analyze_three_states(tmp_path, data_dir):
    assert _run("analyze", data_dir / "motivating.json", "--out", tmp_path) == 0
    assert (tmp_path / "motivating.subdivision.svg").exists()
    assert not (tmp_path / "motivating.value.csv").exists()


def test_compare(tmp_path, data_dir, capsys):
    code = _run("compare", data_dir / "motivating.json", data_dir / "motivating_plus_s.json",
                "--out", tmp_path)
    assert code == 0
    assert "greater value: yes" in capsys.readouterr().out
    code = _run("compare", data_dir / "tent.json", data_dir / "tent_plus_b.json", "--out", tmp_path,
                "--at", "1/2")
    out = capsys.readouterr().out
    assert code == 0 and "greater value: no" in out and "shift-majorizes yes" in out
    assert (tmp_path / "tent__tent_plus_b.verdict.txt").read_text() == out


def test_acquire(tmp_path, data_dir):
    code = _run("acquire", data_dir / "binary.json", "--cost", data_dir / "entropy_cost.json",
                "--prior", "1/2", "--grid", 200, "--out", tmp_path)
    assert code == 0
    rep = _read(tmp_path / "binary.acquire.json")
    assert len(rep["support_mu2"]) == 2
    assert abs(float(rep["weight_sum"]) - 1) < 1e-12
    assert float(rep["mean_error"]) < 1e-9
    assert (tmp_path / "binary.acquire.csv").exists() and (tmp_path / "binary.acquire.svg").exists()


def test_screen(tmp_path, data_dir):
    assert _run("screen", data_dir / "screening.json", "--grid", 200, "--out", tmp_path) == 0
    rep = _read(tmp_path / "screening.screen.json")
    assert rep["diagnostics"]["sb1_equals_fb1"] is True


def test_synth_cost(tmp_path, data_dir):
    code = _run("synth-cost", data_dir / "binary.json", data_dir / "target.json", "--out", tmp_path,
                "--grid", 400)
    assert code == 0
    rep = _read(tmp_path / "binary.cost.json")
    assert rep["nonredundant"] is True and rep["check"]["unique"] is True
    got = sorted(float(e["belief"][1]) for e in rep["check"]["distribution"]["support"])
    assert got == pytest.approx([0.3, 0.8], abs=2 / 400)
    cost = _read(tmp_path / "binary.cost.spec.json")
    assert cost["family"] == "max-paraboloid"


def test_exit_codes(tmp_path, data_dir):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert _run("analyze", bad, "--out", tmp_path) == 2
    assert _run("analyze", tmp_path / "missing.json", "--out", tmp_path) == 2
    assert _run("acquire", data_dir / "binary.json", "--cost", data_dir / "entropy_cost.json",
                "--prior", "1,0", "--out", tmp_path) == 2
    assert _run("analyze", data_dir / "tent.json", "--mode", "fuzzy") == 2
    assert _run("verify", "nonsense", "--out", tmp_path) == 2
    assert _run("acquire", data_dir / "binary.json", "--cost", data_dir / "entropy_cost.json",
                "--out", tmp_path) == 2
    # a redundant target cannot be synthesized
    redundant = tmp_path / "redundant.json"
    redundant.write_text(json.dumps({"support": [{"belief": ["9/10", "1/10"], "weight": "1/2"},
                                                 {"belief": ["4/5", "1/5"], "weight": "1/2"}]}))
    assert _run("synth-cost", data_dir / "binary.json", redundant, "--out", tmp_path) in (2, 3)


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run("verify", "affine", "--quick", "--out", a) == 0
    assert _run("verify", "affine", "--quick", "--out", b) == 0
    assert (a / "verify-affine.json").read_bytes() == (b / "verify-affine.json").read_bytes()


def test_svg_output_is_deterministic(tmp_path, data_dir):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert _run("analyze", data_dir / "motivating.json", "--out", out) == 0
    for name in ("motivating.subdivision.svg", "motivating.subdivision.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_module_entry_point(data_dir, tmp_path):
    res = subprocess.run([sys.executable, "-m", "infovalue", "--version"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "infovalue" in res.stdout
