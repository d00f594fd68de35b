"""Selling information to two types, and delegation with a fixed experiment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .acquisition import (AcquisitionSolution, PosteriorDistribution, UPSCost, eval_cost,
                          is_mpc, is_strict_mpc, solve_acquisition)
from .comparative import is_convex_difference, is_totally_refining
from .decision import DecisionProblem, MaxAffine
from .errors import MalformedInputError, PreconditionError
from .numeric import Mode


@dataclass(frozen=True)
class LinearCombination:
    """``sum_k c_k f_k(mu)`` for value-like objects ``f_k``."""

    terms: tuple

    def evaluate(self, mu):
        return sum(c * f.evaluate(mu) for c, f in self.terms)

    __call__ = evaluate

    @property
    def n(self) -> int:
        return self.terms[0][1].n


def virtual_value(v1: MaxAffine, v2: MaxAffine, rho) -> LinearCombination:
    """``(V2 - rho V1) / (1 - rho)``."""
    k = 1 / (1 - rho)
    return LinearCombination(((k, v2), (-rho * k, v1)))


@dataclass(frozen=True)
class ScreeningInstance:
    v1: MaxAffine
    v2: MaxAffine
    rho: Any
    mu0: tuple
    cost: UPSCost

    def __post_init__(self) -> None:
        if not 0 < self.rho < 1:
            raise MalformedInputError("rho must lie in (0, 1)")
        if self.v1.n != self.v2.n or len(self.mu0) != self.v1.n:
            raise MalformedInputError("types and prior must share one state space")
        if not is_convex_difference(self.v1, self.v2)[0]:
            raise PreconditionError("V1 - V2 must be convex")


@dataclass
class Contract:
    distribution: PosteriorDistribution
    price: Any
    solution: AcquisitionSolution


@dataclass
class ScreeningSolution:
    first_best: tuple
    second_best: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def t1_fb(self):
        return self.first_best[0].price

    @property
    def t2_fb(self):
        return self.first_best[1].price


def _same_distribution(p: PosteriorDistribution, q: PosteriorDistribution, tol=1e-12) -> bool:
    if len(p.support) != len(q.support):
        return False
    qs = dict(q.support)
    for pt, w in p.support:
        if pt not in qs or abs(qs[pt] - w) > tol:
            return False
    return True


def screening_solve(inst: ScreeningInstance, grid_resolution: int | None = None,
                    mode: Mode | str | None = None) -> ScreeningSolution:
    """First-best and second-best contracts for the two-type screening problem."""
    mu0, cost = inst.mu0, inst.cost
    fb1 = solve_acquisition(inst.v1, cost, mu0, grid_resolution, mode=mode)
    fb2 = solve_acquisition(inst.v2, cost, mu0, grid_resolution, mode=mode)
    v1, v2 = inst.v1.evaluate, inst.v2.evaluate
    mu0c = fb1.prior
    t1 = fb1.distribution.expect(v1) - v1(mu0c)
    t2 = fb2.distribution.expect(v2) - v2(mu0c)
    first = (Contract(fb1.distribution, t1, fb1), Contract(fb2.distribution, t2, fb2))

    sb1 = solve_acquisition(inst.v1, cost, mu0, grid_resolution, mode=mode)
    vv = virtual_value(inst.v1, inst.v2, inst.rho)
    sb2 = solve_acquisition(vv, cost, mu0, grid_resolution, mode=mode)
    p1, p2 = sb1.distribution, sb2.distribution
    s2 = p2.expect(v2) - v2(mu0c)                       # IR2 binds
    s1 = p1.expect(v1) - p2.expect(v1) + s2             # IC1 binds
    second = (Contract(p1, s1, sb1), Contract(p2, s2, sb2))

    ic1_gap = (p1.expect(v1) - s1) - (p2.expect(v1) - s2)
    ir1_slack = p1.expect(v1) - s1 - v1(mu0c)
    ic2_slack = (p2.expect(v2) - s2) - (p1.expect(v2) - s1)
    profit_sb = inst.rho * (s1 - eval_cost(cost, p1, mu0c)) \
        + (1 - inst.rho) * (s2 - eval_cost(cost, p2, mu0c))
    profit_fb = inst.rho * (t1 - eval_cost(cost, fb1.distribution, mu0c)) \
        + (1 - inst.rho) * (t2 - eval_cost(cost, fb2.distribution, mu0c))
    tol = 2 / sb2.resolution
    diag = {
        "sb1_equals_fb1": _same_distribution(p1, fb1.distribution),
        "ic1_gap": ic1_gap,
        "ir1_slack": ir1_slack,
        "ic2_slack": ic2_slack,
        "t1_geq_t2": t1 >= t2,
        "fb2_strict_mpc_of_fb1": is_strict_mpc(fb2.distribution, fb1.distribution, mean_tol=tol),
        "sb2_mpc_of_fb2": is_mpc(p2, fb2.distribution, mean_tol=tol),
        "sb2_strict_mpc_of_fb2": is_strict_mpc(p2, fb2.distribution, mean_tol=tol),
        "sb2_unique": sb2.unique,
        "sb2_multiple_optima_possible": not sb2.unique,
        "profit_first_best": profit_fb,
        "profit_second_best": profit_sb,
    }
    return ScreeningSolution(first, second, diag)


# -- delegation --------------------------------------------------------------------------

@dataclass
class DelegationReport:
    buys_without: bool
    buys_with: bool
    gain_without: Any
    gain_with: Any
    payoff_without: Any
    payoff_with: Any
    totally_refining: bool
    guarantee_holds: Optional[bool]

    @property
    def change(self):
        return self.payoff_with - self.payoff_without


def delegation_compare(d: DecisionProblem, extra: Sequence, gamma,
                       experiment: PosteriorDistribution, mu0: Sequence) -> DelegationReport:
    """Does giving the agent ``extra`` actions help a principal with the same
    utility, when the agent buys ``experiment`` at price ``gamma`` only if it
    is worth it to the agent?"""
    if not gamma > 0:
        raise MalformedInputError("gamma must be positive")
    experiment.check_plausible(mu0)
    v = d.value_fn()
    vh = v.union(MaxAffine.of([tuple(e) for e in extra],
                              [f"extra{k}" for k in range(len(extra))])) if extra else v

    def outcome(f):
        gain = experiment.expect(f.evaluate) - f.evaluate(mu0)
        buys = gain >= gamma
        payoff = experiment.expect(f.evaluate) if buys else f.evaluate(mu0)
        return buys, gain, payoff

    b0, g0, p0 = outcome(v)
    b1, g1, p1 = outcome(vh)
    total = is_totally_refining(d, list(extra)) if extra else True
    tol = 1e-12
    guarantee = (p1 >= p0 - tol) if total else None
    return DelegationReport(b0, b1, g0, g1, p0, p1, total, guarantee)
