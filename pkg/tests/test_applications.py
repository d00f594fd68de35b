from __future__ import annotations

from fractions import Fraction as F

import pytest

from infovalue.acquisition import PosteriorDistribution, ScaledEntropy
from infovalue.applications import (ScreeningInstance, delegation_compare, screening_solve,
                                    virtual_value)
from infovalue.decision import MaxAffine
from infovalue.errors import MalformedInputError, PreconditionError
from infovalue.fixtures import binary_problem, screening_fixture, screening_oracle_supports

R = 1000


@pytest.fixture(scope="module")
def screening():
    return screening_solve(screening_fixture(), R)


def _left(dist):
    return min(float(p[1]) for p in dist.points)


def test_screening_supports_match_closed_form(screening):
    want = screening_oracle_supports()
    fb1, fb2 = screening.first_best
    sb1, sb2 = screening.second_best
    assert abs(_left(fb1.distribution) - want["fb1"]) <= 2 / R
    assert abs(_left(fb2.distribution) - want["fb2"]) <= 2 / R
    assert abs(_left(sb2.distribution) - want["sb2"]) <= 2 / R
    assert abs(_left(sb1.distribution) - want["fb1"]) <= 2 / R


def test_screening_prices_and_constraints(screening):
    dg = screening.diagnostics
    assert dg["sb1_equals_fb1"]
    assert dg["t1_geq_t2"]
    assert abs(dg["ic1_gap"]) <= 1e-8
    assert dg["ir1_slack"] >= 0 and dg["ic2_slack"] >= -1e-9
    assert dg["sb2_mpc_of_fb2"] and dg["sb2_strict_mpc_of_fb2"]
    assert dg["fb2_strict_mpc_of_fb1"]
    assert dg["profit_second_best"] <= dg["profit_first_best"] + 1e-12
    # frozen from an independent run of the closed-form solution
    assert screening.t1_fb == pytest.approx(0.5004, abs=2e-3)
    assert screening.t2_fb == pytest.approx(0.381, abs=2e-3)
    assert dg["ir1_slack"] == pytest.approx(0.0664, abs=2e-3)


def test_virtual_value():
    v1 = MaxAffine.of([(2, 0), (0, 2)])
    v2 = MaxAffine.of([(1, 0), (0, 1)])
    vv = virtual_value(v1, v2, F(1, 3))
    mu = (F(1, 4), F(3, 4))
    assert vv.evaluate(mu) == (v2.evaluate(mu) - F(1, 3) * v1.evaluate(mu)) / (1 - F(1, 3))


def test_screening_instance_validation():
    v = binary_problem().value_fn()
    bonus = v.union(MaxAffine.of([(F(6, 5), F(-1, 5))]))
    with pytest.raises(MalformedInputError):
        ScreeningInstance(bonus, v, F(3, 2), (0.5, 0.5), ScaledEntropy(0.5))
    with pytest.raises(PreconditionError):
        # type 1 must have the convex gain
        ScreeningInstance(v, bonus, F(1, 2), (0.5, 0.5), ScaledEntropy(0.5))


def test_delegation_counterexample_without_refinement():
    d = binary_problem()
    exp = PosteriorDistribution.of([(1, 0), (0, 1)], [F(1, 2), F(1, 2)])
    rep = delegation_compare(d, [(F(3, 4), F(3, 4))], F(3, 10), exp, (F(1, 2), F(1, 2)))
    assert rep.buys_without and not rep.buys_with
    assert rep.payoff_without == 1 and rep.payoff_with == F(3, 4)
    assert rep.change < 0
    assert not rep.totally_refining and rep.guarantee_holds is None


def test_delegation_guarantee_with_refining_extra():
    d = binary_problem()
    exp = PosteriorDistribution.of([(1, 0), (0, 1)], [F(1, 2), F(1, 2)])
    rep = delegation_compare(d, [(F(11, 10), F(-1, 10))], F(3, 10), exp, (F(1, 2), F(1, 2)))
    assert rep.buys_without and rep.buys_with
    assert rep.payoff_with == F(21, 20) and rep.guarantee_holds


def test_delegation_rejects_bad_gamma():
    exp = PosteriorDistribution.of([(1, 0), (0, 1)], [F(1, 2), F(1, 2)])
    with pytest.raises(MalformedInputError):
        delegation_compare(binary_problem(), [], 0, exp, (F(1, 2), F(1, 2)))
