from __future__ import annotations

from fractions import Fraction as F

import pytest

from infovalue.decision import (DecisionProblem, MaxAffine, optimal_action_set,
                                restrict_to_cellwise, subdivision, undominated_actions, value_at)
from infovalue.errors import MalformedInputError, PreconditionError
from infovalue.fixtures import binary_problem, motivating_problem, tent_problem
from infovalue.numeric import Mode


def _intervals(d):
    return sorted((min(v[1] for v in c.vertices), max(v[1] for v in c.vertices), c.labels)
                  for c in subdivision(d).cells)


def test_binary_subdivision():
    assert _intervals(binary_problem()) == [(0, F(1, 2), ("a1",)), (F(1, 2), 1, ("a2",))]


def test_tent_subdivision():
    assert _intervals(tent_problem()) == [(0, F(3, 8), ("a1",)), (F(3, 8), F(5, 8), ("safe",)),
                                          (F(5, 8), 1, ("a2",))]


def test_value_and_argmax():
    d = tent_problem()
    assert value_at(d, (F(1, 2), F(1, 2))) == (F(5, 8), frozenset({"safe"}))
    assert value_at(d, (F(5, 8), F(3, 8)))[1] == frozenset({"a1", "safe"})
    assert optimal_action_set(d, (F(9, 10), F(1, 10))) == frozenset({"a1"})
    with pytest.raises(PreconditionError):
        optimal_action_set(d, (1, 0))


def test_float_values_track_exact():
    d = tent_problem()
    v, arg = value_at(d.with_mode(Mode.FLOAT), (0.5, 0.5))
    assert abs(v - 0.625) < 1e-15 and arg == frozenset({"safe"})


def test_dominated_and_duplicate_actions():
    d = DecisionProblem.build({"a": (1, 0), "b": (0, 1), "bad": (0, 0), "twin": (1, 0),
                               "weak": (F(1, 2), F(1, 2))})
    assert undominated_actions(d) == frozenset({"a", "twin", "b"})
    assert len(subdivision(d).cells) == 2


def test_motivating_three_states():
    sub = subdivision(motivating_problem())
    assert sorted(c.labels for c in sub.cells) == [("c",), ("n",)]
    for c in sub.cells:
        assert len(c.vertices) == 4 if c.labels == ("c",) else len(c.vertices) == 3


def test_cellwise_restriction():
    f = tent_problem().value_fn()
    cw = restrict_to_cellwise(f, subdivision(tent_problem()))
    assert cw.is_continuous()
    for k in range(11):
        mu = (1 - F(k, 10), F(k, 10))
        assert cw.evaluate(mu) == f.evaluate(mu)


def test_malformed_problems():
    with pytest.raises(MalformedInputError):
        DecisionProblem.build({"a": (1, 0), "b": (1, 0, 0)})
    with pytest.raises(MalformedInputError):
        DecisionProblem.build({})
    with pytest.raises(MalformedInputError):
        DecisionProblem.build({"a": (float("inf"), 0)})


def test_max_affine_helpers():
    f = MaxAffine.of([(1, 0), (0, 1)])
    assert f.scaled(2).evaluate((F(1, 4), F(3, 4))) == F(3, 2)
    assert f.plus_affine((1, 1)).evaluate((F(1, 2), F(1, 2))) == F(3, 2)
