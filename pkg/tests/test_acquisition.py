from __future__ import annotations

import math
from fractions import Fraction as F

import pytest

from infovalue.acquisition import (PosteriorDistribution, Quadratic, ScaledEntropy, eval_cost,
                                   incomparable_pair_construction, is_mpc, is_nonredundant,
                                   is_strict_mpc, simplex_grid, solve_acquisition, synthesize_cost)
from infovalue.decision import MaxAffine
from infovalue.errors import PlausibilityError, PreconditionError
from infovalue.fixtures import (binary_problem, cross_pair, persuasion_cost, persuasion_prior,
                                tent_problem)

HALF = (F(1, 2), F(1, 2))


def _mu2(sol):
    return sorted(float(p[1]) for p in sol.support)


def test_grid_size():
    assert len(simplex_grid(2, 10)) == 11
    assert len(simplex_grid(3, 4)) == 15


def test_entropy_closed_form():
    # with V = max(mu, 1 - mu) and scaled entropy s, tangency puts the support at
    # 1 / (1 + e^{1/s}) and its mirror image
    v = binary_problem().value_fn()
    for s in (0.5, 0.3):
        R = 1000
        sol = solve_acquisition(v, ScaledEntropy(s), (0.5, 0.5), R)
        lo = 1 / (1 + math.exp(1 / s))
        got = _mu2(sol)
        assert len(got) == 2
        assert abs(got[0] - lo) <= 2 / R and abs(got[1] - (1 - lo)) <= 2 / R
        assert abs(sum(sol.weights) - 1) < 1e-12
        assert max(abs(a - b) for a, b in zip(sol.distribution.mean, (0.5, 0.5))) < 1e-9


def test_costly_information_is_skipped_when_value_is_affine():
    v = MaxAffine.of([(1, 2)])
    sol = solve_acquisition(v, Quadratic(), (0.3, 0.7), 50)
    assert len(sol.support) == 1


def test_persuasion_cost_inside_working_window():
    # eps = 1 keeps the first paraboloid active at 0.3: support {0.3, 0.8}
    v = binary_problem().value_fn()
    sol = solve_acquisition(v, persuasion_cost(eps=1), HALF, 20, mode="exact")
    assert sorted(p[1] for p in sol.support) == [F(3, 10), F(4, 5)]
    assert sorted(sol.weights) == [F(2, 5), F(3, 5)]
    assert sol.dual_gap == 0 and sol.unique


def test_persuasion_prior_on_the_support_is_degenerate():
    v = binary_problem().value_fn()
    sol = solve_acquisition(v, persuasion_cost(eps=1), persuasion_prior(), 2000)
    assert _mu2(sol) == pytest.approx([0.3], abs=1e-9)


def test_persuasion_cost_at_eps_two():
    # at eps = 2 the second paraboloid dominates at 0.3; the optimum moves to {1/4, 3/4}
    v = binary_problem().value_fn()
    sol = solve_acquisition(v, persuasion_cost(eps=2), persuasion_prior(), 2000)
    assert _mu2(sol) == pytest.approx([0.25, 0.75], abs=1e-3)


def test_mpc_basics():
    center = PosteriorDistribution.degenerate(HALF)
    spread = PosteriorDistribution.of([(1, 0), (0, 1)], [F(1, 2), F(1, 2)])
    mid = PosteriorDistribution.of([(F(3, 4), F(1, 4)), (F(1, 4), F(3, 4))], [F(1, 2), F(1, 2)])
    assert is_mpc(center, spread) and not is_mpc(spread, center)
    assert is_strict_mpc(mid, spread) and is_strict_mpc(center, mid)
    assert is_mpc(mid, mid) and not is_strict_mpc(mid, mid)
    other = PosteriorDistribution.of([(1, 0), (0, 1)], [F(1, 3), F(2, 3)])
    with pytest.raises(PreconditionError):
        is_mpc(center, other)


def test_plausibility_check():
    phi = PosteriorDistribution.of([(1, 0), (0, 1)], [F(1, 2), F(1, 2)])
    phi.check_plausible(HALF)
    with pytest.raises(PlausibilityError):
        phi.check_plausible((F(1, 3), F(2, 3)))


def test_eval_cost_entropy():
    phi = PosteriorDistribution.of([(1.0, 0.0), (0.0, 1.0)], [0.5, 0.5])
    # full revelation costs s * ln 2 under scaled entropy
    assert eval_cost(ScaledEntropy(0.5), phi, (0.5, 0.5)) == pytest.approx(0.5 * math.log(2))


def test_nonredundancy():
    d = tent_problem()
    good = PosteriorDistribution.of([(F(9, 10), F(1, 10)), (F(1, 2), F(1, 2))], [F(1, 2), F(1, 2)])
    assert is_nonredundant(d, good)
    same_cell = PosteriorDistribution.of([(F(9, 10), F(1, 10)), (F(4, 5), F(1, 5))], [F(1, 2), F(1, 2)])
    assert not is_nonredundant(d, same_cell)
    on_kink = PosteriorDistribution.of([(F(5, 8), F(3, 8)), (F(1, 8), F(7, 8))], [F(1, 2), F(1, 2)])
    assert not is_nonredundant(d, on_kink)


def test_synthesis_round_trip():
    d = tent_problem()
    phi = PosteriorDistribution.of([(F(9, 10), F(1, 10)), (F(1, 2), F(1, 2))], [F(1, 4), F(3, 4)])
    mu0 = phi.mean
    cost = synthesize_cost(d, phi, mu0, verify_resolution=200)
    R = 400
    sol = solve_acquisition(d.value_fn(), cost, mu0, R)
    want = sorted(float(p[1]) for p in phi.points)
    got = _mu2(sol)
    assert len(got) == len(want)
    assert all(abs(a - b) <= 2 / R for a, b in zip(got, want))


def test_synthesis_with_dependent_support_is_not_unique():
    # three posteriors on a line: every mixture of them is optimal
    d = tent_problem()
    phi = PosteriorDistribution.of([(F(9, 10), F(1, 10)), (F(1, 2), F(1, 2)), (F(1, 5), F(4, 5))],
                                   [F(1, 4), F(1, 2), F(1, 4)])
    cost = synthesize_cost(d, phi, phi.mean)
    sol = solve_acquisition(d.value_fn(), cost, phi.mean, 400)
    assert not sol.unique


def test_synthesis_rejects_redundant_target():
    d = tent_problem()
    phi = PosteriorDistribution.of([(F(9, 10), F(1, 10)), (F(4, 5), F(1, 5))], [F(1, 2), F(1, 2)])
    with pytest.raises(PreconditionError):
        synthesize_cost(d, phi, phi.mean)


def test_incomparable_pair():
    cc = incomparable_pair_construction(*cross_pair())
    assert not is_mpc(cc.phi_v, cc.phi_vhat)
    assert not is_mpc(cc.phi_vhat, cc.phi_v)
    assert cc.solution_v.dual_gap == 0 and cc.solution_vhat.dual_gap == 0
    assert cc.solution_v.unique and cc.solution_vhat.unique
    assert len(cc.phi_v.points) == 2 and len(cc.phi_vhat.points) == 2
