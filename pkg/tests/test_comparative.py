from __future__ import annotations

import warnings
from fractions import Fraction as F

import pytest

from infovalue.comparative import (classify_transformation, common_refinement, has_leftovers,
                                   is_consequential, is_convex_difference, is_refining,
                                   is_strictly_dominated, is_strictly_refining, is_totally_refining,
                                   is_weakly_dominated, lower_convex_envelope_at, difference_function,
                                   refines, shift_majorizes, verify_shift_witness)
from infovalue.decision import DecisionProblem, subdivision
from infovalue.errors import PreconditionError
from infovalue.fixtures import (binary_problem, figure7_additions, motivating_additions,
                                motivating_problem, tent_problem)
from infovalue.transforms import add_actions, affine_transform, remove_actions

HALF = (F(1, 2), F(1, 2))


def test_refining_addition_gives_convex_difference():
    d = motivating_problem()
    s = motivating_additions()["s"]
    assert is_refining(d, s)
    # the region of s reaches the n/c boundary at (1/2, 0, 1/2)
    assert not is_strictly_refining(d, s)
    assert is_strictly_refining(d, (-2, 0, 2))
    dh = add_actions(d, {"s": s})
    ok, wit = is_convex_difference(dh.value_fn(), d.value_fn())
    assert ok and wit is None
    assert refines(subdivision(dh), subdivision(d))


def test_straddling_addition_has_witness():
    d = motivating_problem()
    r = motivating_additions()["r"]
    assert not is_weakly_dominated(d, r)
    assert not is_refining(d, r)
    dh = add_actions(d, {"r": r})
    ok, wit = is_convex_difference(dh.value_fn(), d.value_fn())
    assert not ok
    w = lambda mu: dh.value_fn().evaluate(mu) - d.value_fn().evaluate(mu)
    assert wit.check(w) == wit.gap and wit.gap > 0
    assert not refines(subdivision(dh), subdivision(d))


def test_domination():
    d = binary_problem()
    assert is_weakly_dominated(d, (F(1, 2), F(1, 2)))
    assert not is_strictly_dominated(d, (F(1, 2), F(1, 2)))
    assert is_strictly_dominated(d, (F(1, 3), F(1, 3)))
    assert not is_weakly_dominated(d, (F(3, 5), F(3, 5)))
    # dominated actions count as totally refining
    assert is_totally_refining(d, [(F(1, 3), F(1, 3)), (F(6, 5), F(-1, 5))])
    assert not is_totally_refining(d, [(F(3, 5), F(3, 5))])


def test_affine_scaling():
    d = tent_problem()
    v = d.value_fn()
    assert is_convex_difference(affine_transform(d, 2, 1).value_fn(), v)[0]
    assert is_convex_difference(affine_transform(d, 1, -3).value_fn(), v)[0]
    assert not is_convex_difference(affine_transform(d, F(1, 2)).value_fn(), v)[0]


def test_removal_of_the_middle_action():
    d = tent_problem()
    dh = remove_actions(d, ["safe"])
    assert has_leftovers(d, dh.labels)
    assert is_consequential(d, dh)
    ok, wit = is_convex_difference(dh.value_fn(), d.value_fn())
    assert not ok and wit.gap >= 1e-9
    # removing a dominated action changes nothing
    d2 = add_actions(d, {"junk": (0, 0)})
    assert not is_consequential(d2, remove_actions(d2, ["junk"]))


def test_shift_majorization_on_figure7_fixture():
    d = tent_problem()
    dh = add_actions(d, figure7_additions())
    vh, v = dh.value_fn(), d.value_fn()
    assert not is_convex_difference(vh, v)[0]
    ok, wit = shift_majorizes(vh, v, HALF)
    assert ok and verify_shift_witness(vh, v, HALF, wit)
    # near the safe cell's edge the gain reverses
    ok2, gap = shift_majorizes(vh, v, (F(5, 8), F(3, 8)))
    assert not ok2 and gap > 0


def test_envelope_matches_hand_value():
    d = tent_problem()
    dh = remove_actions(d, ["safe"])
    w = difference_function(dh.value_fn(), d.value_fn())
    # W = -(5/8 - max) is -1/8 at 1/2 and 0 at the safe cell's edges; envelope at 1/2 is -1/8
    assert w.evaluate(HALF) == F(-1, 8)
    assert lower_convex_envelope_at(w, HALF) == F(-1, 8)


def test_float_prior_is_snapped_with_warning():
    d = tent_problem()
    dh = add_actions(d, figure7_additions())
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ok, _ = shift_majorizes(dh.value_fn(), d.value_fn(), (0.5, 0.5))
    assert ok and any("snapped" in str(c.message) for c in caught)


def test_boundary_prior_rejected():
    d = tent_problem()
    with pytest.raises(PreconditionError):
        shift_majorizes(d.value_fn(), d.value_fn(), (1, 0))


def test_common_refinement_of_two_binary_splits():
    a = subdivision(DecisionProblem.build({"x": (1, 0), "y": (0, 1)}))
    b = subdivision(DecisionProblem.build({"x": (1, 0), "y": (0, 3)}))
    c = common_refinement(a, b)
    assert len(c.cells) == 3
    assert refines(c, a) and refines(c, b)


def test_classify_transformation():
    d = motivating_problem()
    dh = add_actions(d, {"s": motivating_additions()["s"]})
    ver = classify_transformation(d, dh, priors=[(F(1, 3), F(1, 3), F(1, 3))])
    assert ver.kind == "addition"
    assert ver.convex_difference and ver.refines and ver.totally_refining
    assert ver.shift_majorizes_at
