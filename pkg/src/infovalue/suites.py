"""Seeded randomized verification suites.

Each suite returns a plain report dictionary that depends only on its
arguments, so re-running with the same seed gives byte-identical JSON.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .acquisition import (PosteriorDistribution, Quadratic, ScaledEntropy, is_mpc,
                          is_nonredundant, is_strict_mpc, solve_acquisition, synthesize_cost)
from .comparative import (has_leftovers, is_consequential,
                          is_convex_difference, is_refining, is_totally_refining,
                          is_weakly_dominated, refines, shift_majorizes, verify_shift_witness)
from .decision import DecisionProblem, MaxAffine, subdivision, undominated_vectors
from .fixtures import figure7_additions, tent_problem
from .transforms import add_actions, affine_transform, remove_actions

F = Fraction
DEFAULT_SEED = 20240611


# -- generators ----------------------------------------------------------------------

def random_problem(rng, n: int, lo: int = -5, hi: int = 5, kmin: int = 2, kmax: int = 5) -> DecisionProblem:
    k = int(rng.integers(kmin, kmax + 1))
    pay = rng.integers(lo, hi + 1, size=(k, n))
    return DecisionProblem.build({f"a{i + 1}": tuple(int(x) for x in row) for i, row in enumerate(pay)})


def random_action(rng, n: int, lo: int = -5, hi: int = 5) -> tuple:
    return tuple(int(x) for x in rng.integers(lo, hi + 1, size=n))


def random_prior(rng, n: int, denom: int = 20) -> tuple:
    """Interior rational prior on a ``1/denom`` lattice."""
    while True:
        cuts = sorted(int(x) for x in rng.integers(1, denom, size=n - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denom])]
        if all(p > 0 for p in parts):
            return tuple(F(p, denom) for p in parts)


def _nonaffine(d: DecisionProblem) -> bool:
    return len(undominated_vectors(d.value_fn())) > 1


def _two_state_pair(rng, want: Callable) -> tuple:
    """Random two-state ``(d, dhat)`` with a nonaffine ``V`` satisfying ``want``."""
    while True:
        d = random_problem(rng, 2)
        if not _nonaffine(d):
            continue
        extra = [random_action(rng, 2) for _ in range(int(rng.integers(1, 3)))]
        dh = add_actions(d, extra)
        if want(d, dh, extra):
            return d, dh, extra


def _report(name: str, seed: int, checked: int, violations: list, **extra) -> dict:
    return {"suite": name, "seed": seed, "checked": checked, "violations": violations[:20],
            "violation_count": len(violations), "passed": not violations and checked > 0, **extra}


# -- flexibility ---------------------------------------------------------------------------

def suite_flexibility(seed: int = DEFAULT_SEED, count2: int = 1000, count3: int = 200) -> dict:
    """Single added action: refining iff convex difference (non-dominated
    additions), convex difference implies refinement, totally refining
    implies convex difference."""
    rng = np.random.default_rng(seed)
    equiv, finer, total, dominated = [], [], [], 0
    checked = 0
    for n, count in ((2, count2), (3, count3)):
        done = 0
        while done < count:
            d = random_problem(rng, n)
            b = random_action(rng, n)
            dh = add_actions(d, [b])
            convex = is_convex_difference(dh.value_fn(), d.value_fn())[0]
            if is_weakly_dominated(d, b):
                dominated += 1
                if not convex:
                    equiv.append({"n": n, "d": d, "b": b, "issue": "dominated but nonconvex"})
                continue
            refining = is_refining(d, b)
            if refining != convex:
                equiv.append({"n": n, "d": d, "b": b, "refining": refining, "convex": convex})
            if convex and not refines(subdivision(dh), subdivision(d)):
                finer.append({"n": n, "d": d, "b": b})
            if is_totally_refining(d, [b]) and not convex:
                total.append({"n": n, "d": d, "b": b})
            done += 1
            checked += 1
    out = _report("flexibility", seed, checked, equiv + finer + total,
                  dominated_skipped=dominated, equivalence_violations=len(equiv),
                  refinement_violations=len(finer), total_refining_violations=len(total))
    return out


def suite_total_refining(seed: int = DEFAULT_SEED, count: int = 300) -> dict:
    """Several added actions: totally refining implies convex difference,
    convex difference implies refinement."""
    rng = np.random.default_rng(seed)
    bad, n_total = [], 0
    for k in range(count):
        n = 2 if k % 3 else 3
        d = random_problem(rng, n)
        extra = [random_action(rng, n) for _ in range(int(rng.integers(1, 4)))]
        dh = add_actions(d, extra)
        convex = is_convex_difference(dh.value_fn(), d.value_fn())[0]
        tot = is_totally_refining(d, extra)
        n_total += tot
        if tot and not convex:
            bad.append({"d": d, "extra": extra, "issue": "totally refining but nonconvex"})
        if convex and not refines(subdivision(dh), subdivision(d)):
            bad.append({"d": d, "extra": extra, "issue": "convex but not refining"})
    return _report("total-refining", seed, count, bad, totally_refining_instances=n_total)


# -- affine transformations -----------------------------------------------------------------

def suite_affine(seed: int = DEFAULT_SEED, count: int = 500) -> dict:
    rng = np.random.default_rng(seed)
    bad, done = [], 0
    while done < count:
        n = 2 if done % 2 == 0 else 3
        d = random_problem(rng, n)
        if not _nonaffine(d):
            continue
        k = F(math.exp(rng.uniform(math.log(0.25), math.log(4)))).limit_denominator(64)
        if done % 25 == 0:
            k = F(1)
        s = int(rng.integers(-3, 4))
        dh = affine_transform(d, k, s)
        convex = is_convex_difference(dh.value_fn(), d.value_fn())[0]
        if convex != (k >= 1):
            bad.append({"d": d, "k": k, "s": s, "convex": convex})
        done += 1
    return _report("affine", seed, done, bad)


# -- removals --------------------------------------------------------------------------------

def suite_removal(seed: int = DEFAULT_SEED, count: int = 500) -> dict:
    """Removals with leftovers that change the value function are never
    convex; every witness is rechecked."""
    rng = np.random.default_rng(seed)
    bad, done, drawn = [], 0, 0
    min_gap = None
    while done < count:
        drawn += 1
        n = 2 if drawn % 2 else 3
        d = random_problem(rng, n, kmin=3, kmax=5)
        labels = list(d.labels)
        m = int(rng.integers(1, len(labels)))
        removed = [labels[i] for i in sorted(rng.choice(len(labels), size=m, replace=False))]
        dh = remove_actions(d, removed)
        if not (has_leftovers(d, dh.labels) and is_consequential(d, dh)):
            continue
        v, vh = d.value_fn(), dh.value_fn()
        convex, wit = is_convex_difference(vh, v)
        if convex:
            bad.append({"d": d, "removed": removed, "issue": "convex"})
        elif wit is None:
            bad.append({"d": d, "removed": removed, "issue": "no witness"})
        else:
            gap = wit.check(lambda mu: vh.evaluate(mu) - v.evaluate(mu))
            if not gap >= 1e-9:
                bad.append({"d": d, "removed": removed, "issue": "witness fails", "gap": gap})
            min_gap = gap if min_gap is None or gap < min_gap else min_gap
        done += 1
    return _report("removal", seed, done, bad, drawn=drawn, min_witness_gap=min_gap)


# -- acquisition ------------------------------------------------------------------------------

def _refining_pair(rng) -> tuple:
    def ok(d, dh, extra):
        return is_convex_difference(dh.value_fn(), d.value_fn())[0] and \
            not all(is_weakly_dominated(d, b) for b in extra)
    return _two_state_pair(rng, ok)


def _random_cost(rng, k: int):
    if k % 2 == 0:
        return ScaledEntropy(float(round(rng.uniform(0.3, 2.0), 3)))
    return Quadratic(((F(int(rng.integers(1, 5))), 0), (0, F(int(rng.integers(1, 5))))))


def suite_more_convex(seed: int = DEFAULT_SEED, count: int = 100, grid: int = 400) -> dict:
    """Convex difference: the transformed solution is never a strict MPC of the original."""
    rng = np.random.default_rng(seed)
    bad = []
    for k in range(count):
        d, dh, extra = _refining_pair(rng)
        cost = ScaledEntropy(float(round(rng.uniform(0.3, 2.0), 3)))
        mu0 = random_prior(rng, 2)
        s0 = solve_acquisition(d.value_fn(), cost, mu0, grid)
        s1 = solve_acquisition(dh.value_fn(), cost, mu0, grid)
        if is_strict_mpc(s1.distribution, s0.distribution, mean_tol=2 / grid):
            bad.append({"d": d, "extra": extra, "prior": mu0, "cost": cost})
    return _report("more-convex", seed, count, bad, grid=grid)


def suite_two_states(seed: int = DEFAULT_SEED, count: int = 100, grid: int = 400) -> dict:
    """Two states with convex difference: the transformed solution is an MPS of the original."""
    rng = np.random.default_rng(seed)
    bad = []
    for k in range(count):
        d, dh, extra = _refining_pair(rng)
        cost = _random_cost(rng, k)
        mu0 = random_prior(rng, 2)
        s0 = solve_acquisition(d.value_fn(), cost, mu0, grid)
        s1 = solve_acquisition(dh.value_fn(), cost, mu0, grid)
        if not is_mpc(s0.distribution, s1.distribution, mean_tol=2 / grid):
            bad.append({"d": d, "extra": extra, "prior": mu0, "cost": cost,
                        "original": s0.distribution, "transformed": s1.distribution})
    return _report("two-states", seed, count, bad, grid=grid)


def _random_target(rng, v: MaxAffine):
    """Non-redundant binary target: one point inside each of two cells."""
    groups = undominated_vectors(v)
    sub = subdivision(DecisionProblem.build({"+".join(l): u for u, l in groups}))
    cells = sorted(sub.cells, key=lambda c: min(x[1] for x in c.vertices))
    i, j = sorted(int(x) for x in rng.choice(len(cells), size=2, replace=False))
    pts = []
    for c in (cells[i], cells[j]):
        lo = min(x[1] for x in c.vertices)
        hi = max(x[1] for x in c.vertices)
        t = F(int(rng.integers(1, 10)), 10)
        pts.append(lo + t * (hi - lo))
    w = F(int(rng.integers(1, 10)), 10)
    mean = (1 - w) * pts[0] + w * pts[1]
    phi = PosteriorDistribution.of([(1 - pts[0], pts[0]), (1 - pts[1], pts[1])], [1 - w, w])
    return phi, (1 - mean, mean)


def suite_synthesis(seed: int = DEFAULT_SEED, count: int = 50, grid: int = 400) -> dict:
    """Synthesized costs reproduce their target supports."""
    rng = np.random.default_rng(seed)
    bad, done = [], 0
    eps_used = []
    while done < count:
        d = random_problem(rng, 2)
        v = d.value_fn()
        if len(undominated_vectors(v)) < 2:
            continue
        phi, mu0 = _random_target(rng, v)
        if not is_nonredundant(v, phi):
            continue
        rep = synthesize_cost(d, phi, mu0, report=True)
        sol = solve_acquisition(v, rep.cost, mu0, grid, extra_points=phi.points)
        got = sorted(float(p[1]) for p in sol.distribution.points)
        want = sorted(float(p[1]) for p in phi.points)
        if len(got) != len(want) or max(abs(a - b) for a, b in zip(got, want)) > 2 / grid:
            bad.append({"d": d, "target": phi, "prior": mu0, "got": got})
        eps_used.append(rep.eps)
        done += 1
    return _report("synthesis", seed, done, bad, grid=grid,
                   eps_min=min(eps_used) if eps_used else None)


# -- MPC oracle ----------------------------------------------------------------------------------

def _random_dist(rng, n: int, size: int, denom: int = 8) -> PosteriorDistribution:
    pts = [random_prior(rng, n, denom) for _ in range(size)]
    raw = [int(x) for x in rng.integers(1, 5, size=size)]
    tot = sum(raw)
    return PosteriorDistribution.of(pts, [F(r, tot) for r in raw])


def _spread(rng, p: PosteriorDistribution) -> PosteriorDistribution:
    """Split one support point of ``p`` into two along a random direction."""
    k = int(rng.integers(0, len(p.support)))
    mu, w = p.support[k]
    n = len(mu)
    for _ in range(50):
        other = random_prior(rng, n, 8)
        d = tuple(a - b for a, b in zip(other, mu))
        if all(x == 0 for x in d):
            continue
        t = F(int(rng.integers(1, 4)), 4)
        a = tuple(m + t * x for m, x in zip(mu, d))
        b = tuple(m - t * x for m, x in zip(mu, d))
        if all(x >= 0 for x in a + b):
            rest = [s for j, s in enumerate(p.support) if j != k]
            return PosteriorDistribution.of([s[0] for s in rest] + [a, b],
                                            [s[1] for s in rest] + [w / 2, w / 2])
    return p


def convex_screen(p: PosteriorDistribution, q: PosteriorDistribution, seed: int = 7,
                  family: int = 200, pairs: bool = True) -> bool:
    """Necessary condition for ``p`` MPC ``q``: ``E_p f <= E_q f`` for every
    max of one or two functions from a fixed random affine family (and all
    their triples drawn at random)."""
    n = p.n
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(family, n))
    P = np.array([[float(x) for x in mu] for mu in p.points])
    Q = np.array([[float(x) for x in mu] for mu in q.points])
    pw = np.array([float(w) for w in p.weights])
    qw = np.array([float(w) for w in q.weights])
    vp, vq = P @ A.T, Q @ A.T                  # points x family
    tol = 1e-9
    if np.any(pw @ vp > qw @ vq + tol):
        return False
    if pairs:
        for i in range(family):
            mp = np.maximum(vp[:, i:i + 1], vp[:, i + 1:])
            mq = np.maximum(vq[:, i:i + 1], vq[:, i + 1:])
            if np.any(pw @ mp > qw @ mq + tol):
                return False
        trip = rng.integers(0, family, size=(4000, 3))
        mp = vp[:, trip].max(axis=2)
        mq = vq[:, trip].max(axis=2)
        if np.any(pw @ mp > qw @ mq + tol):
            return False
    return True


def curated_mpc_cases() -> list:
    """``(p, q, p_is_mpc_of_q)`` with couplings worked out by hand."""
    h = F(1, 2)
    D = PosteriorDistribution.of
    e = lambda x: (1 - x, x)
    cases = [
        (D([e(h)], [1]), D([e(0), e(1)], [h, h]), True),
        (D([e(0), e(1)], [h, h]), D([e(h)], [1]), False),
        (D([e(F(1, 4)), e(F(3, 4))], [h, h]), D([e(0), e(1)], [h, h]), True),
        (D([e(0), e(1)], [h, h]), D([e(F(1, 4)), e(F(3, 4))], [h, h]), False),
        (D([e(F(1, 4)), e(F(3, 4))], [h, h]), D([e(0), e(h), e(1)], [F(1, 4), h, F(1, 4)]), True),
        (D([e(0), e(h), e(1)], [F(1, 4), h, F(1, 4)]), D([e(F(1, 4)), e(F(3, 4))], [h, h]), False),
        (D([e(F(1, 3)), e(F(2, 3))], [h, h]), D([e(F(1, 4)), e(F(3, 4))], [h, h]), True),
        (D([e(F(1, 4)), e(F(3, 4))], [h, h]), D([e(F(1, 3)), e(F(2, 3))], [h, h]), False),
        (D([e(0), e(F(5, 8))], [F(1, 5), F(4, 5)]), D([e(F(1, 4)), e(F(3, 4))], [h, h]), False),
        (D([e(F(1, 4)), e(F(3, 4))], [h, h]), D([e(0), e(F(3, 4))], [F(1, 3), F(2, 3)]), True),
        (D([e(h)], [1]), D([e(F(1, 4)), e(F(3, 4))], [h, h]), True),
        (D([e(F(2, 5))], [1]), D([e(0), e(1)], [F(3, 5), F(2, 5)]), True),
        (D([e(F(1, 10)), e(F(9, 10))], [h, h]), D([e(0), e(1)], [h, h]), True),
        (D([e(F(1, 4)), e(h), e(F(3, 4))], [F(1, 4), h, F(1, 4)]), D([e(0), e(1)], [h, h]), True),
        (D([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [F(1, 3)] * 3), D([(F(1, 3),) * 3], [1]), False),
        (D([(F(1, 3),) * 3], [1]), D([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [F(1, 3)] * 3), True),
        (D([(h, h, 0), (0, 0, 1)], [F(2, 3), F(1, 3)]), D([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [F(1, 3)] * 3), True),
        (D([(h, h, 0), (0, 0, 1)], [F(2, 3), F(1, 3)]), D([(1, 0, 0), (0, h, h)], [F(1, 3), F(2, 3)]), False),
        (D([(h, 0, h), (0, 1, 0)], [F(2, 3), F(1, 3)]), D([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [F(1, 3)] * 3), True),
        (D([(F(1, 3),) * 3], [1]), D([(h, h, 0), (0, 0, 1)], [F(2, 3), F(1, 3)]), True),
    ]
    return cases


def suite_mpc_oracle(seed: int = DEFAULT_SEED, count: int = 200) -> dict:
    """``is_mpc`` against a convex-function screen on random pairs and
    against hand-worked couplings."""
    rng = np.random.default_rng(seed)
    bad, inconclusive, positives = [], 0, 0
    for k in range(count):
        n = 2 + k % 2
        p = _random_dist(rng, n, int(rng.integers(1, 4)))
        q = _spread(rng, p) if k % 3 else _random_dist(rng, n, int(rng.integers(1, 4)))
        if q.mean != p.mean:
            # random pairs: move q onto p's mean by mixing with a point mass
            shift = tuple(a - b for a, b in zip(p.mean, q.mean))
            pts = [tuple(x + s for x, s in zip(mu, shift)) for mu in q.points]
            if any(x < 0 for mu in pts for x in mu):
                continue
            q = PosteriorDistribution.of(pts, q.weights)
        if len(q.support) > 3:
            continue
        for a, b in ((p, q), (q, p)):
            exact = is_mpc(a, b)
            screen = convex_screen(a, b)
            positives += exact
            if exact and not screen:
                bad.append({"p": a, "q": b, "exact": exact, "screen": screen})
            elif screen and not exact:
                inconclusive += 1
    curated = curated_mpc_cases()
    for a, b, expected in curated:
        if is_mpc(a, b) != expected:
            bad.append({"p": a, "q": b, "expected": expected})
    return _report("mpc-oracle", seed, count, bad, curated=len(curated),
                   positives=positives, screen_inconclusive=inconclusive)


# -- shift majorization ---------------------------------------------------------------------------

def suite_shift(seed: int = DEFAULT_SEED, count: int = 200) -> dict:
    """Convex difference implies shift-majorization at every prior (witness
    rechecked), plus a non-refining fixture where it holds at 1/2."""
    rng = np.random.default_rng(seed)
    bad, done = [], 0
    while done < count:
        n = 2 if done % 2 == 0 else 3
        d = random_problem(rng, n)
        extra = [random_action(rng, n) for _ in range(int(rng.integers(1, 3)))]
        dh = add_actions(d, extra)
        v, vh = d.value_fn(), dh.value_fn()
        if not is_convex_difference(vh, v)[0]:
            continue
        mu0 = random_prior(rng, n)
        ok, wit = shift_majorizes(vh, v, mu0)
        if not ok or not verify_shift_witness(vh, v, mu0, wit, tol=0):
            bad.append({"d": d, "extra": extra, "prior": mu0, "result": ok})
        done += 1
    d = tent_problem()
    dh = add_actions(d, figure7_additions())
    v, vh = d.value_fn(), dh.value_fn()
    half = (F(1, 2), F(1, 2))
    ok, wit = shift_majorizes(vh, v, half)
    fixture = {"convex": is_convex_difference(vh, v)[0], "shift_at_half": ok,
               "witness_verified": bool(ok and verify_shift_witness(vh, v, half, wit, tol=0))}
    if fixture["convex"] or not fixture["witness_verified"]:
        bad.append({"fixture": fixture})
    return _report("shift", seed, done, bad, fixture=fixture)


SUITES = {
    "flexibility": suite_flexibility,
    "total-refining": suite_total_refining,
    "affine": suite_affine,
    "removal": suite_removal,
    "more-convex": suite_more_convex,
    "two-states": suite_two_states,
    "synthesis": suite_synthesis,
    "mpc-oracle": suite_mpc_oracle,
    "shift": suite_shift,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, **kw) -> dict:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(seed=seed, **kw)
