"""Posterior-separable information costs and flexible information acquisition.

Acquisition is solved by concavifying ``V - c`` over a uniform grid of the
simplex: an LP over weights on grid beliefs whose barycenter is the prior.
The prior (and any caller-supplied beliefs) are appended to the grid so the
LP is always feasible and targeted support points are representable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .decision import DecisionProblem, MaxAffine, subdivision_of, undominated_vectors
from .errors import (InapplicableError, MalformedInputError, PlausibilityError,
                     PreconditionError, SynthesisError)
from .geometry import chart, dedupe_points, is_interior, validate_belief
from .lp import Constraint, LinearProgram, Status, solve_lp
from .numeric import STRICT_TOL, Mode, coerce, dot, infer_mode

WEIGHT_CUTOFF = 1e-9
DEFAULT_GRID = {2: 400, 3: 60, 4: 20}


# -- distributions ----------------------------------------------------------------

@dataclass(frozen=True)
class PosteriorDistribution:
    """Finite distribution over beliefs; ``support`` holds ``(belief, weight)``."""

    support: tuple

    def __post_init__(self) -> None:
        if not self.support:
            raise MalformedInputError("a distribution needs at least one support point")
        n = len(self.support[0][0])
        for mu, w in self.support:
            if len(mu) != n:
                raise MalformedInputError("support beliefs have different dimensions")
            if w <= 0:
                raise MalformedInputError("support weights must be positive")

    @classmethod
    def of(cls, points: Sequence, weights: Sequence) -> "PosteriorDistribution":
        if len(points) != len(weights):
            raise MalformedInputError("points and weights differ in length")
        merged: dict = {}
        order = []
        for p, w in zip(points, weights):
            p = tuple(p)
            if p not in merged:
                merged[p] = 0
                order.append(p)
            merged[p] = merged[p] + w
        return cls(tuple((p, merged[p]) for p in order))

    @classmethod
    def degenerate(cls, mu: Sequence) -> "PosteriorDistribution":
        return cls(((tuple(mu), coerce(1, infer_mode(list(mu)))),))

    @classmethod
    def binary(cls, a: Sequence, b: Sequence, mean: Sequence) -> "PosteriorDistribution":
        """The distribution on ``{a, b}`` with barycenter ``mean`` (must lie on the segment)."""
        d = [y - x for x, y in zip(a, b)]
        k = max(range(len(d)), key=lambda i: abs(d[i]))
        if d[k] == 0:
            raise MalformedInputError("binary support points coincide")
        s = (mean[k] - a[k]) / d[k]
        if not 0 < s < 1:
            raise PlausibilityError("mean does not lie strictly between the support points")
        return cls.of([tuple(a), tuple(b)], [1 - s, s])

    @property
    def n(self) -> int:
        return len(self.support[0][0])

    @property
    def points(self) -> list:
        return [p for p, _ in self.support]

    @property
    def weights(self) -> list:
        return [w for _, w in self.support]

    @property
    def mean(self) -> tuple:
        return tuple(sum(w * p[i] for p, w in self.support) for i in range(self.n))

    @property
    def mode(self) -> Mode:
        return infer_mode([list(p) for p in self.points], self.weights)

    def expect(self, f: Callable) -> Any:
        return sum(w * f(p) for p, w in self.support)

    def mixture(self, other: "PosteriorDistribution", lam) -> "PosteriorDistribution":
        pts = self.points + other.points
        ws = [lam * w for w in self.weights] + [(1 - lam) * w for w in other.weights]
        return PosteriorDistribution.of(pts, ws)

    def check_plausible(self, mu0: Sequence, tol: float | None = None) -> None:
        if tol is None:
            tol = 0 if (self.mode is Mode.EXACT and infer_mode(list(mu0)) is Mode.EXACT) else 1e-8
        total = sum(self.weights)
        if abs(total - 1) > tol:
            raise PlausibilityError(f"weights sum to {total}, not 1")
        gap = max(abs(a - b) for a, b in zip(self.mean, mu0))
        if gap > tol:
            raise PlausibilityError(f"distribution mean differs from the prior by {float(gap):.3g}")


# -- costs -----------------------------------------------------------------------

def _sqdist(a: Sequence, b: Sequence):
    """Squared distance in chart coordinates (first state dropped)."""
    return sum((x - y) ** 2 for x, y in zip(chart(a), chart(b)))


class UPSCost:
    """Potential ``c`` of a uniformly posterior-separable cost."""

    family = "abstract"
    exact_capable = False

    def potential(self, mu: Sequence):
        raise NotImplementedError

    def __call__(self, mu: Sequence):
        return self.potential(mu)

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class ScaledEntropy(UPSCost):
    """``c(mu) = scale * sum(mu_i ln mu_i)`` (negative Shannon entropy)."""

    scale: float = 1.0
    family = "entropy"

    def potential(self, mu):
        s = 0.0
        for x in mu:
            x = float(x)
            if x > 0:
                s += x * math.log(x)
        return float(self.scale) * s

    def params(self) -> dict:
        return {"scale": self.scale}


@dataclass(frozen=True)
class Quadratic(UPSCost):
    """``c(mu) = mu^T M mu``; identity ``M`` when ``matrix`` is ``None``."""

    matrix: Optional[tuple] = None
    family = "quadratic"
    exact_capable = True

    def potential(self, mu):
        if self.matrix is None:
            return sum(x * x for x in mu)
        return sum(mu[i] * self.matrix[i][j] * mu[j]
                   for i in range(len(mu)) for j in range(len(mu)))

    def params(self) -> dict:
        return {"matrix": self.matrix}


@dataclass(frozen=True)
class MaxParaboloid(UPSCost):
    """``c(mu) = max_i (a_i . mu + eps * |mu - center_i|^2)``.

    ``pieces`` holds ``(a_i, center_i)`` pairs of n-vectors; distances are
    taken in chart coordinates.
    """

    pieces: tuple
    eps: Any
    family = "max-paraboloid"
    exact_capable = True

    def potential(self, mu):
        return max(dot(a, mu) + self.eps * _sqdist(mu, ctr) for a, ctr in self.pieces)

    def active(self, mu) -> int:
        vals = [dot(a, mu) + self.eps * _sqdist(mu, ctr) for a, ctr in self.pieces]
        return max(range(len(vals)), key=vals.__getitem__)

    def params(self) -> dict:
        return {"eps": self.eps, "pieces": [{"slope": list(a), "center": list(c)}
                                            for a, c in self.pieces]}


@dataclass(frozen=True)
class AffineShiftOfValue(UPSCost):
    """``c(mu) = eps * rho(mu) + vhat(mu)``."""

    base: MaxAffine
    eps: Any
    regularizer: UPSCost
    family = "affine-shift"

    @property
    def exact_capable(self) -> bool:  # type: ignore[override]
        return self.regularizer.exact_capable

    def potential(self, mu):
        return self.eps * self.regularizer.potential(mu) + self.base.evaluate(mu)

    def params(self) -> dict:
        return {"eps": self.eps, "regularizer": {"family": self.regularizer.family,
                                                 **self.regularizer.params()},
                "base": [list(p) for p, _ in self.base.pieces]}


def check_strict_convexity(cost: UPSCost, n: int, samples: int = 200, seed: int = 0,
                           margin: float = 1e-12) -> bool:
    """Sampled midpoint test: ``c(mid) < (c(x) + c(y)) / 2`` for random pairs."""
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        x, y = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        if np.linalg.norm(x - y) < 1e-3:
            continue
        mid = (x + y) / 2
        if not cost.potential(tuple(mid)) < (cost.potential(tuple(x)) + cost.potential(tuple(y))) / 2 - margin:
            return False
    return True


def eval_cost(cost: UPSCost, phi: PosteriorDistribution, mu0: Sequence):
    """``D(Phi) = E_Phi c - c(mu0)``."""
    phi.check_plausible(mu0)
    return phi.expect(cost.potential) - cost.potential(mu0)


# -- acquisition ---------------------------------------------------------------------

def simplex_grid(n: int, R: int, mode: Mode = Mode.FLOAT) -> list:
    """All beliefs with coordinates in ``{0, 1/R, ..., 1}``."""
    pts = []
    for bars in itertools.combinations(range(R + n - 1), n - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(R + n - 2 - prev)
        if mode is Mode.EXACT:
            pts.append(tuple(Fraction(k, R) for k in parts))
        else:
            pts.append(tuple(k / R for k in parts))
    return pts


@dataclass
class AcquisitionSolution:
    distribution: PosteriorDistribution
    net_value: Any
    lp_value: Any
    prior: tuple
    grid_size: int
    resolution: int
    dual: tuple
    dual_gap: Any
    tight_points: list
    unique: bool
    mode: Mode = Mode.FLOAT

    @property
    def support(self) -> list:
        return self.distribution.points

    @property
    def weights(self) -> list:
        return self.distribution.weights


def _affinely_independent(points: Sequence) -> bool:
    if len(points) <= 1:
        return True
    base = np.array(points[0], dtype=float)
    M = np.array([np.array(p, dtype=float) - base for p in points[1:]])
    return np.linalg.matrix_rank(M, tol=1e-10) == len(points) - 1


def solve_acquisition(v, cost: UPSCost, mu0: Sequence, grid_resolution: int | None = None,
                      extra_points: Sequence = (), mode: Mode | str | None = None
                      ) -> AcquisitionSolution:
    """Maximize ``E_Phi v - D(Phi)`` over Bayes-plausible ``Phi`` on a grid.

    ``v`` is anything with an ``evaluate`` method.  The default mode is
    float; exact mode needs a rational cost family and rational data.
    """
    n = len(mu0)
    if n < 2:
        raise MalformedInputError("beliefs need at least two states")
    if grid_resolution is None:
        grid_resolution = DEFAULT_GRID.get(n, 10)
    if int(grid_resolution) != grid_resolution or grid_resolution < 2:
        raise MalformedInputError("grid resolution must be an integer >= 2")
    grid_resolution = int(grid_resolution)
    mode = Mode(mode) if mode is not None else Mode.FLOAT
    if mode is Mode.EXACT and not cost.exact_capable:
        raise MalformedInputError(f"the {cost.family} cost cannot be evaluated exactly")
    mu0 = validate_belief(mu0, n, mode if mode is Mode.FLOAT else None)
    if not is_interior(mu0):
        raise PreconditionError("the prior must lie in the interior of the simplex")
    mu0 = tuple(coerce(x, mode) for x in mu0)
    if mode is Mode.EXACT and isinstance(v, MaxAffine) and v.mode is not Mode.EXACT:
        v = v.with_mode(Mode.EXACT)

    pts = simplex_grid(n, grid_resolution, mode)
    extras = [mu0] + [tuple(coerce(x, mode) for x in p) for p in extra_points]
    pts = dedupe_points(pts + extras, mode) if mode is Mode.EXACT else _merge_float(pts, extras)
    f = [v.evaluate(p) - cost.potential(p) for p in pts]
    zero = coerce(0, mode)
    cons = tuple(Constraint(tuple(p[i] for p in pts), "=", mu0[i]) for i in range(n))
    lp = LinearProgram(tuple(f), cons, tuple((zero, None) for _ in pts), "max")
    res = solve_lp(lp, mode)
    if res.status is not Status.OPTIMAL:
        raise PreconditionError(f"acquisition LP returned {res.status.value}")

    lam = res.solution
    cutoff = 0 if mode is Mode.EXACT else WEIGHT_CUTOFF
    keep = [(p, w) for p, w in zip(pts, lam) if w > cutoff]
    total = sum(w for _, w in keep)
    dist = PosteriorDistribution(tuple((p, w / total) for p, w in keep))
    y = res.certificate
    dual_value = dot(y, mu0)
    gap = dual_value - res.value
    tol = 0 if mode is Mode.EXACT else 1e-9
    tight_idx = [k for k, (p, fv) in enumerate(zip(pts, f)) if dot(y, p) - fv <= tol]
    tight = [pts[k] for k in tight_idx]
    support_set = set(dist.points)
    unique = _affinely_independent(dist.points) and (
        set(tight) == support_set
        or _no_other_optimum(tight, [f[k] for k in tight_idx], support_set, mu0, res.value, mode))
    c0 = cost.potential(mu0)
    return AcquisitionSolution(dist, res.value + c0, res.value, mu0, len(pts),
                               grid_resolution, tuple(y), gap, tight, unique, mode)


def _no_other_optimum(tight, ftight, support, mu0, value, mode) -> bool:
    """Every optimum lives on ``support``: the most mass an optimal solution
    can put on the other tight points is zero."""
    zero = coerce(0, mode)
    n = len(mu0)
    cons = [Constraint(tuple(p[i] for p in tight), "=", mu0[i]) for i in range(n)]
    slack = 0 if mode is Mode.EXACT else 1e-9 * max(1.0, abs(float(value)))
    cons.append(Constraint(tuple(ftight), ">=", value - slack))
    obj = tuple(zero if p in support else coerce(1, mode) for p in tight)
    lp = LinearProgram(obj, tuple(cons), tuple((zero, None) for _ in tight), "max")
    res = solve_lp(lp, mode)
    if res.status is not Status.OPTIMAL:
        return False
    return res.value <= (0 if mode is Mode.EXACT else 1e-7)


def _merge_float(pts: list, extras: list) -> list:
    out = list(pts)
    arr = np.array(pts, dtype=float)
    for e in extras:
        e = tuple(float(x) for x in e)
        if np.min(np.max(np.abs(arr - np.array(e)), axis=1)) >= 1e-12:
            out.append(e)
            arr = np.vstack([arr, e])
    return out


# -- Blackwell order ---------------------------------------------------------------------

def is_mpc(p: PosteriorDistribution, q: PosteriorDistribution, mean_tol: float | None = None,
           mode: Mode | str | None = None) -> bool:
    """Is ``p`` a mean-preserving contraction of ``q``?

    Searches for a Markov kernel ``M`` from ``supp p`` to ``supp q`` with
    ``sum_x p(x) M(x, .) = q`` and barycenter ``x`` for each row.
    ``mean_tol`` relaxes the barycenter rows (used for grid solutions).
    """
    if p.n != q.n:
        raise MalformedInputError("distributions over different state spaces")
    if mode is None:
        mode = Mode.EXACT if (p.mode is Mode.EXACT and q.mode is Mode.EXACT
                              and (mean_tol is None or isinstance(mean_tol, Fraction)
                                   or mean_tol == 0)) else Mode.FLOAT
    mode = Mode(mode)
    slack = coerce(0 if mean_tol is None else mean_tol, mode)
    base_tol = 0 if mode is Mode.EXACT else 1e-8
    if mode is Mode.FLOAT and mean_tol is None:
        slack = 1e-8
    gap = max(abs(a - b) for a, b in zip(p.mean, q.mean))
    if gap > max(base_tol, float(slack)):
        raise PreconditionError("distributions have different means")
    P = [tuple(coerce(x, mode) for x in pt) for pt in p.points]
    Q = [tuple(coerce(x, mode) for x in pt) for pt in q.points]
    pw = [coerce(w, mode) for w in p.weights]
    qw = [coerce(w, mode) for w in q.weights]
    nx, ny, n = len(P), len(Q), p.n
    zero, one = coerce(0, mode), coerce(1, mode)
    nv = nx * ny
    idx = lambda x, y: x * ny + y

    cons = []
    for x in range(nx):
        row = [zero] * nv
        for y in range(ny):
            row[idx(x, y)] = one
        cons.append(Constraint(tuple(row), "=", one))
    qtol = coerce(base_tol, mode)
    for y in range(ny):
        row = [zero] * nv
        for x in range(nx):
            row[idx(x, y)] = pw[x]
        if qtol:
            cons.append(Constraint(tuple(row), "<=", qw[y] + qtol))
            cons.append(Constraint(tuple(row), ">=", qw[y] - qtol))
        else:
            cons.append(Constraint(tuple(row), "=", qw[y]))
    for x in range(nx):
        for i in range(n):
            row = [zero] * nv
            for y in range(ny):
                row[idx(x, y)] = Q[y][i]
            if slack:
                cons.append(Constraint(tuple(row), "<=", P[x][i] + slack))
                cons.append(Constraint(tuple(row), ">=", P[x][i] - slack))
            else:
                cons.append(Constraint(tuple(row), "=", P[x][i]))
    lp = LinearProgram(tuple([zero] * nv), tuple(cons), tuple((zero, None) for _ in range(nv)), "max")
    return solve_lp(lp, mode).status is Status.OPTIMAL


def is_strict_mpc(p: PosteriorDistribution, q: PosteriorDistribution, **kw) -> bool:
    return is_mpc(p, q, **kw) and not is_mpc(q, p, **kw)


# -- non-redundancy and cost synthesis ----------------------------------------------------

def _cell_index(groups: list, mu: Sequence, mode: Mode) -> Optional[int]:
    """Index of the unique strict maximizer among ``groups`` at ``mu``."""
    vals = [dot(u, mu) for u, _ in groups]
    best = max(range(len(vals)), key=vals.__getitem__)
    tol = 0 if mode is Mode.EXACT else STRICT_TOL
    if any(vals[best] - v <= tol for k, v in enumerate(vals) if k != best):
        return None
    return best


def _value_groups(v: MaxAffine) -> list:
    return undominated_vectors(v)


def is_nonredundant(d, phi: PosteriorDistribution) -> bool:
    """Each support point in the interior of its own cell."""
    v = d.value_fn() if isinstance(d, DecisionProblem) else d
    mode = Mode.EXACT if (v.mode is Mode.EXACT and phi.mode is Mode.EXACT) else Mode.FLOAT
    groups = _value_groups(v)
    seen = set()
    for p in phi.points:
        p = tuple(coerce(x, mode) for x in p)
        k = _cell_index(groups, p, mode)
        if k is None or k in seen:
            return False
        seen.add(k)
    return True


def persuasion_start(v: MaxAffine, phi: PosteriorDistribution):
    """Midpoint of the analytic epsilon window of the two-state persuasion
    instance ``V = max{mu, 1 - mu}`` with support ``{eta, 1/2 + eta}``;
    ``None`` when the instance does not have that shape."""
    if v.n != 2 or len(phi.support) != 2:
        return None
    vecs = {tuple(p) for p, _ in _value_groups(v)}
    if vecs != {(1, 0), (0, 1)}:
        return None
    lo, hi = sorted(p[1] for p in phi.points)
    if abs(hi - lo - Fraction(1, 2)) > (0 if isinstance(hi, Fraction) else 1e-12):
        return None
    eta = lo
    a, b = 4 - 8 * eta, 8 * eta
    return (a + b) / 2


@dataclass
class SynthesisReport:
    cost: MaxParaboloid
    eps: Any
    start: Any
    halvings: int
    margin: Any


def _synthesis_margin(pieces, groups_of_piece, eps, targets, v, mode):
    """Smallest ``V(mu_k) - t_j(mu_k)`` over support points and foreign pieces."""
    worst = None
    for k, mu in targets:
        vk = v.evaluate(mu)
        for j, (a, ctr) in enumerate(pieces):
            if j == k:
                continue
            gap = vk - (dot(a, mu) + eps * _sqdist(mu, ctr))
            worst = gap if worst is None or gap < worst else worst
    return worst


def synthesize_cost(d, phi: PosteriorDistribution, mu0: Sequence, start=None,
                    max_halvings: int = 60, verify_resolution: int | None = None,
                    report: bool = False):
    """Max-paraboloid cost whose acquisition problem is solved by ``phi``.

    One paraboloid per cell of ``V``'s subdivision, centred on the support
    point in that cell (or on the first support point for empty cells).
    ``eps`` starts at the persuasion-instance midpoint when applicable,
    else 1, and is halved until every support point is the unique maximizer
    of ``V - c`` among the cost pieces.
    """
    v = d.value_fn() if isinstance(d, DecisionProblem) else d
    mode = Mode.EXACT if (v.mode is Mode.EXACT and phi.mode is Mode.EXACT
                          and infer_mode(list(mu0)) is Mode.EXACT) else Mode.FLOAT
    if not is_nonredundant(v, phi):
        raise PreconditionError("target distribution is redundant")
    phi.check_plausible(mu0)
    if mode is Mode.FLOAT:
        v = v.with_mode(Mode.FLOAT)
    groups = _value_groups(v)
    pts = [tuple(coerce(x, mode) for x in p) for p in phi.points]
    owner = {}
    for p in pts:
        owner[_cell_index(groups, p, mode)] = p
    first = pts[0]
    pieces = tuple((tuple(u), owner.get(k, first)) for k, (u, _) in enumerate(groups))
    targets = [(k, p) for k, p in owner.items()]

    if start is None:
        start = persuasion_start(v, phi)
        if start is None:
            start = 1
    eps = coerce(start, mode)
    tol = 0 if mode is Mode.EXACT else STRICT_TOL
    for halvings in range(max_halvings + 1):
        margin = _synthesis_margin(pieces, None, eps, targets, v, mode)
        if margin is None or margin > tol:
            cost = MaxParaboloid(pieces, eps)
            if verify_resolution:
                _verify_synthesis(v, cost, phi, verify_resolution)
            if report:
                return SynthesisReport(cost, eps, coerce(start, mode), halvings, margin)
            return cost
        eps = eps / 2
    raise SynthesisError(f"no admissible eps after {max_halvings} halvings")


def _verify_synthesis(v, cost, phi, R):
    tol = 1e-9
    for p in simplex_grid(phi.n, R):
        if v.evaluate(p) - cost.potential(p) > tol:
            raise SynthesisError("synthesized cost lies below the value function")


# -- adversarial costs ----------------------------------------------------------------------

def adversarial_cost(vhat: MaxAffine, eps, regularizer: UPSCost) -> AffineShiftOfValue:
    """``c = eps * rho + vhat``: under it ``vhat - c`` is strictly concave."""
    if not eps > 0:
        raise MalformedInputError("eps must be positive")
    return AffineShiftOfValue(vhat, eps, regularizer)


# -- cross construction --------------------------------------------------------------------

@dataclass
class CrossConstruction:
    prior: tuple
    cost: MaxParaboloid
    phi_v: PosteriorDistribution
    phi_vhat: PosteriorDistribution
    solution_v: AcquisitionSolution
    solution_vhat: AcquisitionSolution
    shift: tuple
    target: PosteriorDistribution


def _is_affine(f: MaxAffine) -> bool:
    return len(_value_groups(f)) == 1


def incomparable_pair_construction(v: MaxAffine, vhat: MaxAffine, grid_resolution: int = 8,
                                   mode: Mode | str = Mode.EXACT) -> CrossConstruction:
    """Prior, cost and two Blackwell-incomparable unique solutions.

    Requires three or more states and neither ``v`` nor ``vhat - v`` affine.
    ``v`` is shifted by an affine function so that it crosses ``vhat``;
    two beliefs in distinct cells of the shifted ``v`` and two in distinct
    cells of ``vhat`` form a cross around the prior, and a synthesized cost
    makes each pair the unique solution for its own value function.
    """
    from .comparative import difference_function, is_convex_difference

    if v.n < 3:
        raise InapplicableError("the cross construction needs at least three states")
    if _is_affine(v):
        raise InapplicableError("v is affine")
    mode = Mode(mode)
    if mode is Mode.EXACT and (v.mode is not Mode.EXACT or vhat.mode is not Mode.EXACT):
        mode = Mode.FLOAT
    v, vhat = v.with_mode(mode), vhat.with_mode(mode)
    w = difference_function(vhat, v)
    pieces_w = set(w.pieces)
    n = v.n
    unit = [tuple(coerce(1 if i == j else 0, mode) for j in range(n)) for i in range(n)]
    H = tuple(vhat.evaluate(e) - v.evaluate(e) for e in unit)
    if all(tuple(p) == H for p in pieces_w):
        raise InapplicableError("vhat - v is affine")
    convex, _ = is_convex_difference(vhat, v)
    if not convex:
        raise InapplicableError("vhat - v is not convex; the comparison already fails")
    verts = w.subdivision.vertices()
    depth = -min(w.evaluate(x) - dot(H, x) for x in verts)
    if not depth > 0:
        raise InapplicableError("vhat - v has no interior dip below its vertex chord")

    for frac in (Fraction(1, 2), Fraction(1, 4), Fraction(3, 4), Fraction(1, 8), Fraction(7, 8)):
        shift_c = depth * coerce(frac, mode)
        shift = tuple(h - shift_c for h in H)
        vs = v.plus_affine(shift)
        out = _try_cross(v, vhat, vs, shift, grid_resolution, mode)
        if out is not None:
            return out
    raise InapplicableError("no cross found for this pair of value functions")


def _try_cross(v, vhat, vs, shift, R, mode):
    tilde = MaxAffine(tuple((p, "v:" + l) for p, l in vs.pieces)
                      + tuple((p, "h:" + l) for p, l in vhat.pieces))
    sub = subdivision_of(tilde)
    v_cells = [c for c in sub.cells if any(l.startswith("v:") for l in c.labels)
               and not any(l.startswith("h:") for l in c.labels)]
    h_cells = [c for c in sub.cells if any(l.startswith("h:") for l in c.labels)
               and not any(l.startswith("v:") for l in c.labels)]
    if len(v_cells) < 2 or len(h_cells) < 2:
        return None
    groups = _value_groups(tilde)
    n = v.n
    half = coerce(Fraction(1, 2), mode)

    def cell_of(mu):
        return _cell_index(groups, mu, mode)

    for c1, c2 in itertools.combinations(v_cells, 2):
        q1, q2 = c1.polytope.centroid(), c2.polytope.centroid()
        mu0 = tuple(half * (a + b) for a, b in zip(q1, q2))
        if not is_interior(mu0):
            continue
        k1, k2 = cell_of(q1), cell_of(q2)
        if k1 is None or k2 is None or k1 == k2:
            continue
        qdir = [b - a for a, b in zip(q1, q2)]
        for d in _directions(n, mu0, h_cells, mode):
            if _parallel(d, qdir):
                continue
            pair = _cross_points(mu0, d, cell_of, {k1, k2}, tilde, mode)
            if pair is None:
                continue
            p1, p2 = pair
            phi_h = PosteriorDistribution.binary(p1, p2, mu0)
            phi_v = PosteriorDistribution.binary(q1, q2, mu0)
            target = phi_h.mixture(phi_v, half)
            if not is_nonredundant(tilde, target):
                continue
            try:
                cost = synthesize_cost(tilde, target, mu0)
            except (SynthesisError, PreconditionError):
                continue
            extra = [p1, p2, q1, q2]
            sol_v = solve_acquisition(v, cost, mu0, R, extra, mode)
            sol_h = solve_acquisition(vhat, cost, mu0, R, extra, mode)
            if set(sol_v.support) != {q1, q2} or set(sol_h.support) != {p1, p2}:
                continue
            if not (sol_v.unique and sol_h.unique):
                continue
            if is_mpc(sol_v.distribution, sol_h.distribution) or \
                    is_mpc(sol_h.distribution, sol_v.distribution):
                continue
            return CrossConstruction(mu0, cost, sol_v.distribution, sol_h.distribution,
                                     sol_v, sol_h, shift, target)
    return None


def _directions(n, mu0, h_cells, mode):
    """Candidate directions: towards each ``vhat``-cell centroid, then simplex vertices."""
    out = []
    for c in h_cells:
        ctr = c.polytope.centroid()
        out.append(tuple(a - b for a, b in zip(ctr, mu0)))
    for i in range(n):
        e = [coerce(1 if j == i else 0, mode) for j in range(n)]
        out.append(tuple(a - b for a, b in zip(e, mu0)))
    return [d for d in out if any(x != 0 for x in d)]


def _parallel(a, b) -> bool:
    A = np.array([[float(x) for x in a], [float(x) for x in b]])
    return np.linalg.matrix_rank(A, tol=1e-10) < 2


def _cross_points(mu0, d, cell_of, banned, tilde, mode):
    """``mu0 +- t d`` inside two distinct ``vhat``-cells, scanning ``t`` downward."""
    # largest t keeping both ends in the simplex interior
    tmax = None
    for sign in (1, -1):
        for m, di in zip(mu0, d):
            step = sign * di
            if step < 0:
                lim = m / (-step)
                tmax = lim if tmax is None or lim < tmax else tmax
    if tmax is None:
        return None
    for k in range(1, 40):
        t = tmax * coerce(Fraction(40 - k, 40), mode)
        p1 = tuple(m + t * x for m, x in zip(mu0, d))
        p2 = tuple(m - t * x for m, x in zip(mu0, d))
        c1, c2 = cell_of(p1), cell_of(p2)
        if c1 is None or c2 is None or c1 == c2 or c1 in banned or c2 in banned:
            continue
        lbl1 = tilde_labels(tilde, c1)
        lbl2 = tilde_labels(tilde, c2)
        if all(l.startswith("h:") for l in lbl1) and all(l.startswith("h:") for l in lbl2):
            return p1, p2
    return None


def tilde_labels(tilde: MaxAffine, k: int) -> tuple:
    return _value_groups(tilde)[k][1]
