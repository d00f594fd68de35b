from __future__ import annotations

import math
from fractions import Fraction as F

import pytest

from infovalue.comparative import is_convex_difference, refines
from infovalue.decision import DecisionProblem, subdivision
from infovalue.errors import InapplicableError, MalformedInputError
from infovalue.fixtures import binary_problem, risk_case_1a, risk_case_2, tent_problem
from infovalue.transforms import (UtilityMap, add_actions, affine_transform, cara_wealth_factor,
                                  compose_utility, perturb_break_refinement, remove_actions,
                                  restrict_actions)


def test_add_and_remove():
    d = binary_problem()
    dh = add_actions(d, [(F(1, 2), F(1, 2)), (2, -1)])
    assert dh.labels == ("a1", "a2", "b1", "b2")
    assert remove_actions(dh, ["b1", "b2"]).labels == d.labels
    assert restrict_actions(dh, ["a1"]).labels == ("a1",)
    with pytest.raises(MalformedInputError):
        add_actions(d, {"a1": (0, 0)})
    with pytest.raises(MalformedInputError):
        remove_actions(d, ["a1", "a2"])
    with pytest.raises(MalformedInputError):
        remove_actions(d, ["zzz"])


def test_float_addition_switches_mode():
    dh = add_actions(binary_problem(), [(0.5, 0.5)])
    assert all(isinstance(x, float) for a in dh.actions for x in a.payoffs)


def test_affine_transform_keeps_the_subdivision():
    d = tent_problem()
    dh = affine_transform(d, 3, -2)
    assert [c.labels for c in subdivision(dh).cells] == [c.labels for c in subdivision(d).cells]
    with pytest.raises(MalformedInputError):
        affine_transform(d, 0)


def test_cara_wealth_factor():
    # CARA at higher wealth is a scaled-down copy: e^{-alpha (w_hat - w)}
    assert cara_wealth_factor(1, 0, math.log(2)) == pytest.approx(0.5)
    assert cara_wealth_factor(2, 1, 1) == 1
    # lower wealth scales payoffs up (k > 1): a convex difference
    d = tent_problem()
    k = F(cara_wealth_factor(1, 0, -math.log(2))).limit_denominator(1000)
    assert k == 2
    assert is_convex_difference(affine_transform(d, k).value_fn(), d.value_fn())[0]


def test_utility_maps():
    phi = UtilityMap("exp", (1.0,))
    assert phi.shape == "concave"
    assert UtilityMap("exp", (-1.0,)).shape == "convex"
    assert UtilityMap("power", (2, 1)).shape == "convex"
    for x in (-0.5, 0.0, 0.3, 2.0):
        assert phi.inverse(phi(x)) == pytest.approx(x)
    assert UtilityMap("affine", (F(2), F(1)))(F(1, 2)) == 2
    with pytest.raises(MalformedInputError):
        UtilityMap("cubic", ())
    with pytest.raises(MalformedInputError):
        UtilityMap("affine", (-1, 0))


def test_compose_checks():
    d = binary_problem()
    with pytest.raises(MalformedInputError):
        compose_utility(d, UtilityMap("exp", (1.0,)), shape="convex")
    assert compose_utility(d, UtilityMap("identity")).actions == d.actions


def test_risk_case_1a_is_broken():
    d, phi = risk_case_1a()
    assert refines(subdivision(compose_utility(d, phi)), subdivision(d))
    dp, rep = perturb_break_refinement(d, phi)
    assert rep.case == "1a" and rep.broken
    assert not refines(subdivision(compose_utility(dp, phi)), subdivision(dp))


def test_risk_case_2_is_broken():
    d, phi = risk_case_2()
    dp, rep = perturb_break_refinement(d, phi)
    assert rep.case == "2" and rep.broken
    assert rep.kinks_before[0] == pytest.approx(0.75)


def test_identity_finds_no_break():
    d = binary_problem()
    dp, rep = perturb_break_refinement(d, UtilityMap("identity"), F(1, 10000))
    assert not rep.broken and "no break" in rep.message


def test_perturbation_preconditions():
    with pytest.raises(InapplicableError):
        perturb_break_refinement(DecisionProblem.build({"a": (1, 0, 0), "b": (0, 1, 0)}),
                                 UtilityMap("identity"))
    with pytest.raises(InapplicableError):
        perturb_break_refinement(DecisionProblem.build({"a": (1, 1)}), UtilityMap("identity"))
