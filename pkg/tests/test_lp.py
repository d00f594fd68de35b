from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest

from infovalue.lp import (Constraint, LinearProgram, Status, decide_negative_slack, decide_strict,
                          solve_lp, strict_feasibility, verify_certificate)

NONNEG = ((0, None),)


def test_small_exact_optimum():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0 -> (8/5, 6/5)
    lp = LinearProgram.build((1, 1), [Constraint((1, 2), "<=", 4), Constraint((3, 1), "<=", 6)],
                             bounds=NONNEG * 2)
    res = solve_lp(lp, "exact")
    assert res.status is Status.OPTIMAL
    assert res.value == F(14, 5)
    assert tuple(res.solution) == (F(8, 5), F(6, 5))
    assert verify_certificate(lp, res)


def test_infeasible_and_unbounded():
    lp = LinearProgram.build((1,), [Constraint((1,), "<=", -1)], bounds=NONNEG)
    assert solve_lp(lp, "exact").status is Status.INFEASIBLE
    lp = LinearProgram.build((1, 0), [Constraint((0, 1), "<=", 1)], bounds=NONNEG * 2)
    assert solve_lp(lp, "exact").status is Status.UNBOUNDED


def test_equality_and_min():
    lp = LinearProgram.build((2, 3), [Constraint((1, 1), "=", 1)], NONNEG * 2, "min")
    res = solve_lp(lp, "exact")
    assert res.value == 2 and tuple(res.solution) == (1, 0)


def test_degenerate_does_not_cycle():
    # a classic cycling example under the textbook rule
    c = (F(3, 4), -150, F(1, 50), -6)
    cons = [Constraint((F(1, 4), -60, F(-1, 25), 9), "<=", 0),
            Constraint((F(1, 2), -90, F(-1, 50), 3), "<=", 0),
            Constraint((0, 0, 1, 0), "<=", 1)]
    res = solve_lp(LinearProgram.build(c, cons, NONNEG * 4), "exact")
    assert res.status is Status.OPTIMAL
    assert res.value == F(1, 20)


def test_matches_scipy_on_random_programs():
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(3)
    for _ in range(40):
        m, n = 4, 3
        A = rng.integers(-3, 6, size=(m, n))
        b = rng.integers(1, 10, size=m)
        c = rng.integers(-2, 5, size=n)
        lp = LinearProgram.build(tuple(int(x) for x in c),
                                 [Constraint(tuple(int(x) for x in row), "<=", int(r))
                                  for row, r in zip(A, b)], NONNEG * n)
        ours = solve_lp(lp, "exact")
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
        if ref.status == 3:
            assert ours.status is Status.UNBOUNDED
            continue
        assert ours.status is Status.OPTIMAL
        assert abs(float(ours.value) + ref.fun) < 1e-7
        fl = solve_lp(lp, "float")
        assert abs(float(fl.value) - float(ours.value)) < 1e-7


def test_strict_feasibility_and_screens():
    # mu2 > 1/2 on the 1-simplex: row (1, -1) . mu <= 0 strictly
    rows = [((1, -1), 0)]
    ok, mu = strict_feasibility(rows, n=2)
    assert ok and mu[1] > mu[0]
    assert decide_strict(rows, 2)
    # mu2 > 1 and mu2 < 0 together: impossible
    assert not decide_strict([((0, 1), 0), ((0, -1), -1)], 2)
    # boundary only: mu2 <= 0 has no strictly negative slack
    assert not decide_negative_slack([((0, 1), 0)], 2)


def test_free_variables_by_default():
    lp = LinearProgram.build((1,), [Constraint((1,), "<=", 3)], sense="min")
    assert solve_lp(lp, "exact").status is Status.UNBOUNDED


def test_float_mode_rejects_nan():
    from infovalue.errors import NumericDomainError
    lp = LinearProgram.build((float("nan"),), [], NONNEG)
    with pytest.raises(NumericDomainError):
        solve_lp(lp, "float")
