"""Canonical instances used by the CLI, the verification suites and the tests."""

from __future__ import annotations

import math
from fractions import Fraction

from .acquisition import MaxParaboloid, ScaledEntropy
from .applications import ScreeningInstance
from .decision import DecisionProblem, MaxAffine
from .transforms import UtilityMap

F = Fraction


def binary_problem() -> DecisionProblem:
    """``V = max{mu, 1 - mu}``: guess the state."""
    return DecisionProblem.build({"a1": (1, 0), "a2": (0, 1)})


def motivating_problem() -> DecisionProblem:
    """Three states, a narrow action ``n`` and a complementary one ``c``."""
    return DecisionProblem.build({"n": (1, 0, 0), "c": (0, 1, 1)}, ("x", "y", "z"))


def motivating_additions() -> dict:
    """``s`` refines the two cells; ``r`` straddles the boundary."""
    return {"s": (-1, 0, 2), "r": (F(3, 5), F(3, 5), F(1, 2))}


def tent_problem() -> DecisionProblem:
    """``max{mu, 1 - mu}`` with a safe action that is optimal around 1/2."""
    return DecisionProblem.build({"a1": (1, 0), "a2": (0, 1), "safe": (F(5, 8), F(5, 8))})


def figure7_additions() -> dict:
    """Two non-refining actions after which ``W`` is not convex but the
    value of information at 1/2 still rises."""
    return {"b1": (F(4, 5), F(2, 5)), "b2": (F(2, 5), F(4, 5))}


def persuasion_cost(eta=F(3, 10), eps=2) -> MaxParaboloid:
    """Max of paraboloids whose pieces are the value pieces of
    ``binary_problem`` centred at ``eta`` and ``1/2 + eta`` (as ``mu_2``)."""
    eta = F(eta) if not isinstance(eta, float) else eta
    lo = (1 - eta, eta)
    hi = (F(1, 2) - eta, F(1, 2) + eta)
    return MaxParaboloid((((1, 0), lo), ((0, 1), hi)), eps)


def persuasion_prior():
    return (F(7, 10), F(3, 10))


def cross_pair() -> tuple:
    """Three-state pair for the incomparable-acquisition construction."""
    v = motivating_problem().value_fn()
    vhat = v.union(MaxAffine.of([(-1, 0, 2)], ["s"]))
    return v, vhat


def risk_case_1a() -> tuple:
    """Symmetric two-action problem with a concave utility: the kink stays at 1/2."""
    return binary_problem(), UtilityMap("exp", (1.0,))


def risk_case_2() -> tuple:
    """Concave utility moves the first kink left of its original position 3/4."""
    phi = UtilityMap("exp", (1.0,))
    x = phi.inverse(3 * (phi(1) - phi(0.5)))
    d = DecisionProblem.build({"a1": (3.0, 0.0), "a2": (0.0, 1.0), "a3": (x, 0.5)})
    return d, phi


def screening_fixture() -> ScreeningInstance:
    """Two types; type 1 has an extra action that refines the left cell."""
    v2 = binary_problem().value_fn()
    v1 = v2.union(MaxAffine.of([(F(6, 5), F(-1, 5))], ["bonus"]))
    return ScreeningInstance(v1, v2, F(1, 2), (0.5, 0.5), ScaledEntropy(0.5))


def screening_oracle_supports() -> dict:
    """Closed-form interior supports (as ``mu_2``) for ``screening_fixture``.

    With entropy scale ``s`` and value slopes ``-k`` and ``1`` on the two
    sides, tangency gives ``ln(mu / (1 - mu)) = -(1 + k) / (2 s)`` on the left
    and the symmetric point on the right.
    """
    left = lambda k: 1 / (1 + math.exp((1 + k) / (2 * 0.5)))
    return {"fb1": left(1.4), "fb2": left(1.0), "sb2": left(0.6)}
