"""Acceptance criteria 1-13.

Each test records one ``CRITERION k: PASS|FAIL ...`` line; the lines are
printed in the terminal summary (see ``conftest.py``) and when this file is
run as a script.  The randomized criteria read the reports written by the
``verify`` command, and criterion 13 re-runs every suite into a second
directory and compares bytes.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from infovalue.acquisition import incomparable_pair_construction, is_mpc
from infovalue.applications import screening_solve
from infovalue.cli import main
from infovalue.fixtures import cross_pair, screening_fixture
from infovalue.suites import SUITES

pytestmark = pytest.mark.acceptance

DATA = Path(__file__).resolve().parent.parent / "data"
RESULTS: dict = {}


def record(k: int, ok: bool, detail: str) -> None:
    RESULTS[k] = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(RESULTS[k])


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


_REPORTS: dict = {}


def verify_report(base: Path, name: str, sub: str = "first") -> tuple:
    key = (sub, name)
    if key not in _REPORTS:
        out = base / sub
        code = main(["verify", name, "--out", str(out)])
        path = out / f"verify-{name}.json"
        _REPORTS[key] = (code, path, json.loads(path.read_text()))
    return _REPORTS[key]


# 1 -----------------------------------------------------------------------------------

def test_criterion_01_persuasion_reproduction(runs):
    out = runs / "acquire"
    code = main(["acquire", str(DATA / "binary.json"), "--cost", str(DATA / "persuasion_cost.json"),
                 "--prior", "3/10", "--grid", "2000", "--out", str(out)])
    rep = json.loads((out / "binary.acquire.json").read_text())
    got = sorted(float(x) for x in rep["support_mu2"])
    want = [0.3, 0.8]
    near = lambda x, ys: any(abs(x - y) <= 1e-3 for y in ys)
    support_ok = all(near(x, want) for x in got) and all(near(y, got) for y in want)
    wsum = abs(float(rep["weight_sum"]) - 1) <= 1e-9
    mean = float(rep["mean_error"]) <= 1e-9
    ok = code == 0 and support_ok and wsum and mean
    record(1, ok, f"support {got} vs {want} (tol 1e-3); weight sum ok={wsum}; mean ok={mean}")
    assert ok


# 2, 3 -------------------------------------------------------------------------------

def test_criterion_02_refining_iff_convex(runs):
    code, _, rep = verify_report(runs, "flexibility")
    ok = rep["checked"] == 1200 and rep["equivalence_violations"] == 0
    record(2, ok, f"{rep['checked']} additions checked, {rep['equivalence_violations']} "
                  f"discrepancies, {rep['dominated_skipped']} dominated additions skipped")
    assert ok


def test_criterion_03_convex_implies_refines(runs):
    _, _, flex = verify_report(runs, "flexibility")
    _, _, tot = verify_report(runs, "total-refining")
    bad = flex["refinement_violations"] + flex["total_refining_violations"] + tot["violation_count"]
    ok = bad == 0 and flex["checked"] > 0 and tot["checked"] > 0
    record(3, ok, f"{flex['checked']} single + {tot['checked']} multiple additions, {bad} violations")
    assert ok


# 4-7 ---------------------------------------------------------------------------------

@pytest.mark.parametrize("k,suite,count", [(4, "affine", 500), (5, "removal", 500),
                                           (6, "more-convex", 100), (7, "two-states", 100)])
def test_criteria_04_to_07_suites(runs, k, suite, count):
    code, _, rep = verify_report(runs, suite)
    ok = rep["passed"] and rep["checked"] == count and rep["violation_count"] == 0
    record(k, ok, f"suite {suite}: {rep['checked']} instances, {rep['violation_count']} violations")
    assert ok


# 8 ----------------------------------------------------------------------------------

def test_criterion_08_incomparable_pair():
    cc = incomparable_pair_construction(*cross_pair(), grid_resolution=8, mode="exact")
    a, b = cc.phi_v, cc.phi_vhat
    binary = len(a.points) == 2 and len(b.points) == 2
    incomparable = not is_mpc(a, b) and not is_mpc(b, a)
    unique = cc.solution_v.unique and cc.solution_vhat.unique
    gaps = cc.solution_v.dual_gap == 0 and cc.solution_vhat.dual_gap == 0
    ok = binary and incomparable and unique and gaps
    record(8, ok, f"binary={binary} incomparable={incomparable} unique={unique} dual gaps zero={gaps}")
    assert ok


# 9-11 ------------------------------------------------------------------------------------

@pytest.mark.parametrize("k,suite,count", [(9, "synthesis", 50), (10, "mpc-oracle", 200),
                                           (11, "shift", 200)])
def test_criteria_09_to_11_suites(runs, k, suite, count):
    code, _, rep = verify_report(runs, suite)
    ok = rep["passed"] and rep["checked"] >= count and rep["violation_count"] == 0
    extra = ""
    if suite == "shift":
        fx = rep["fixture"]
        ok = ok and fx["shift_at_half"] and not fx["convex"] and fx["witness_verified"]
        extra = f"; fixture convex={fx['convex']} shift at 1/2={fx['shift_at_half']}"
    record(k, ok, f"suite {suite}: {rep['checked']} checks, {rep['violation_count']} "
                  f"disagreements{extra}")
    assert ok


# 12 -------------------------------------------------------------------------------------

def test_criterion_12_screening():
    sol = screening_solve(screening_fixture(), 1000)
    dg = sol.diagnostics
    ok = (dg["sb1_equals_fb1"] and dg["t1_geq_t2"] and abs(dg["ic1_gap"]) <= 1e-8
          and dg["sb2_mpc_of_fb2"])
    record(12, ok, f"SB1=FB1 {dg['sb1_equals_fb1']}, t1={float(sol.t1_fb):.4f} >= "
                   f"t2={float(sol.t2_fb):.4f}, IC1 gap {float(dg['ic1_gap']):.1e}, "
                   f"SB2 MPC of FB2 {dg['sb2_mpc_of_fb2']}")
    assert ok


# 13 -------------------------------------------------------------------------------------

def test_criterion_13_determinism(runs):
    differing = []
    for name in sorted(SUITES):
        _, first, _ = verify_report(runs, name)
        _, second, _ = verify_report(runs, name, "second")
        if first.read_bytes() != second.read_bytes():
            differing.append(name)
    ok = not differing
    record(13, ok, f"{len(SUITES)} suites re-run, byte-identical reports"
           if ok else f"reports differ for {differing}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
