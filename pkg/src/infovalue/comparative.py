"""Comparisons between an initial and a transformed decision problem."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .decision import (Cell, CellwiseAffine, DecisionProblem, MaxAffine, Subdivision,
                       subdivision, subdivision_of, undominated_actions, value_at)
from .errors import MalformedInputError, PreconditionError
from .geometry import (Polytope, contains, intersect, is_full_dimensional, is_interior,
                       segment_breaks, validate_belief)
from .lp import Constraint, LinearProgram, Status, decide_negative_slack, decide_strict, solve_lp
from .numeric import STRICT_TOL, Mode, coerce, dot, infer_mode


def _joint_mode(*objs) -> Mode:
    return Mode.EXACT if all(o.mode is Mode.EXACT for o in objs) else Mode.FLOAT


def _tol(mode: Mode):
    return 0 if mode is Mode.EXACT else STRICT_TOL


def _align(f: MaxAffine, mode: Mode) -> MaxAffine:
    return f if f.mode is mode else f.with_mode(mode)


# -- refinement -------------------------------------------------------------

def refines(fine: Subdivision, coarse: Subdivision) -> bool:
    """Every cell of ``fine`` sits inside some cell of ``coarse``."""
    if fine.n != coarse.n:
        raise MalformedInputError("subdivisions over different state spaces")
    return all(any(contains(c.polytope, f.polytope) for c in coarse.cells) for f in fine.cells)


def common_refinement(c1: Subdivision, c2: Subdivision) -> Subdivision:
    """Full-dimensional pairwise intersections, labelled by label pairs."""
    if c1.n != c2.n:
        raise MalformedInputError("subdivisions over different state spaces")
    mode = _joint_mode(c1, c2)
    cells = []
    for i, a in enumerate(c1.cells):
        for j, b in enumerate(c2.cells):
            poly = intersect(a.polytope, b.polytope)
            if is_full_dimensional(poly):
                cells.append(Cell((a.label, b.label), poly, None, (i, j)))
    return Subdivision(c1.n, tuple(cells), mode)


def _difference(vhat: MaxAffine, v: MaxAffine):
    """``W = vhat - v`` as a cellwise-affine function on the common refinement."""
    if vhat.n != v.n:
        raise MalformedInputError("value functions over different state spaces")
    mode = _joint_mode(vhat, v)
    vhat, v = _align(vhat, mode), _align(v, mode)
    sh, s = subdivision_of(vhat), subdivision_of(v)
    ref = common_refinement(sh, s)
    pieces = []
    for cell in ref.cells:
        i, j = cell.parents
        pieces.append(tuple(a - b for a, b in zip(sh.cells[i].payoff, s.cells[j].payoff)))
    return CellwiseAffine(ref, tuple(pieces)), vhat, v, mode


def difference_function(vhat: MaxAffine, v: MaxAffine) -> CellwiseAffine:
    return _difference(vhat, v)[0]


@dataclass(frozen=True)
class NonconvexityWitness:
    """``W(lam mu + (1-lam) mu') > lam W(mu) + (1-lam) W(mu')`` by ``gap``."""

    mu: tuple
    mu_prime: tuple
    lam: object
    gap: object

    def check(self, w) -> object:
        """Recompute the violation of convexity for callable ``w``."""
        mid = tuple(self.lam * a + (1 - self.lam) * b for a, b in zip(self.mu, self.mu_prime))
        return w(mid) - (self.lam * w(self.mu) + (1 - self.lam) * w(self.mu_prime))


def _midpoint_witness(wfun, halfspaces, y, x, mode) -> Optional[NonconvexityWitness]:
    """Walk the segment ``y -> x`` and return a midpoint triple around the
    first concave kink of ``W`` restricted to it."""
    zero, one = coerce(0, mode), coerce(1, mode)
    ss = sorted(set([zero, one] + segment_breaks(halfspaces, y, x)))
    pts = [tuple(a + s * (b - a) for a, b in zip(y, x)) for s in ss]
    vals = [wfun(p) for p in pts]
    slopes = [(vals[k + 1] - vals[k]) / (ss[k + 1] - ss[k]) for k in range(len(ss) - 1)]
    best = None
    for k in range(1, len(slopes)):
        drop = slopes[k - 1] - slopes[k]
        if drop > _tol(mode):
            h = min(ss[k] - ss[k - 1], ss[k + 1] - ss[k])
            gap = drop * h / 2
            if best is None or gap > best[0]:
                best = (gap, k, h)
    if best is None:
        return None
    gap, k, h = best
    a = tuple(p + (ss[k] - h) * (q - p) for p, q in zip(y, x))
    b = tuple(p + (ss[k] + h) * (q - p) for p, q in zip(y, x))
    half = one / 2
    return NonconvexityWitness(a, b, half, gap)


def is_convex_difference(vhat: MaxAffine, v: MaxAffine):
    """Is ``vhat - v`` convex?  Returns ``(bool, witness-or-None)``.

    Each cell piece, extended affinely, must lie below ``W`` at every vertex
    of the common refinement.  On failure the witness is a midpoint triple
    around a concave kink of ``W`` on a segment leaving the offending cell.
    """
    w, vhat, v, mode = _difference(vhat, v)
    tol = _tol(mode)
    ref = w.subdivision
    verts = ref.vertices()
    wvals = {vx: vhat.evaluate(vx) - v.evaluate(vx) for vx in verts}
    wfun = lambda mu: vhat.evaluate(mu) - v.evaluate(mu)
    worst = None
    for k, piece in enumerate(w.pieces):
        for vx in verts:
            excess = dot(piece, vx) - wvals[vx]
            if excess > tol and (worst is None or excess > worst[0]):
                worst = (excess, k, vx)
    if worst is None:
        return True, None
    _, k, x = worst
    y = ref.cells[k].polytope.centroid()
    halfspaces = [h for c in ref.cells for h in c.polytope.halfspaces]
    wit = _midpoint_witness(wfun, halfspaces, y, x, mode)
    return False, wit


# -- single actions ---------------------------------------------------------

def _against_all_rows(d: DecisionProblem, new: Sequence, mode: Mode):
    """Rows ``(u_b - new) . mu <= 0`` for every action ``b``."""
    new = [coerce(x, mode) for x in new]
    zero = coerce(0, mode)
    return [(tuple(coerce(b, mode) - a for a, b in zip(new, act.payoffs)), zero)
            for act in d.actions]


def _mode_with(d: DecisionProblem, *vecs) -> Mode:
    if d.mode is Mode.EXACT and infer_mode(*[list(v) for v in vecs]) is Mode.EXACT:
        return Mode.EXACT
    return Mode.FLOAT


def _check_dim(d: DecisionProblem, new: Sequence) -> None:
    if len(new) != d.n:
        raise MalformedInputError(f"new action has {len(new)} payoffs for {d.n} states")


def is_weakly_dominated(d: DecisionProblem, new: Sequence) -> bool:
    """``new . mu <= V(mu)`` everywhere (never a strict improvement)."""
    _check_dim(d, new)
    mode = _mode_with(d, new)
    rows = _against_all_rows(d, new, mode)
    return not decide_strict(rows, d.n, mode)


def is_strictly_dominated(d: DecisionProblem, new: Sequence) -> bool:
    """``new . mu < V(mu)`` everywhere on the simplex."""
    _check_dim(d, new)
    mode = _mode_with(d, new)
    rows = _against_all_rows(d, new, mode)
    return decide_negative_slack(rows, d.n, mode)


def optimality_region(d: DecisionProblem, new: Sequence) -> Polytope:
    """``{mu : new . mu >= V(mu)}``."""
    mode = _mode_with(d, new)
    return Polytope.make(d.n, _against_all_rows(d, new, mode), mode)


def _container(d: DecisionProblem, new: Sequence):
    """``(region, subdivision, index of a containing cell or None)``."""
    region = optimality_region(d, new)
    sub = subdivision(d)
    for k, c in enumerate(sub.cells):
        if contains(c.polytope, region):
            return region, sub, k
    return region, sub, None


def is_refining(d: DecisionProblem, new: Sequence) -> bool:
    if is_weakly_dominated(d, new):
        return False
    return _container(d, new)[2] is not None


def is_strictly_refining(d: DecisionProblem, new: Sequence) -> bool:
    if is_weakly_dominated(d, new):
        return False
    region, sub, k = _container(d, new)
    if k is None:
        return False
    return all(intersect(region, c.polytope).is_empty for j, c in enumerate(sub.cells) if j != k)


def is_totally_refining(d: DecisionProblem, new_actions: Sequence) -> bool:
    return all(is_weakly_dominated(d, b) or is_refining(d, b) for b in new_actions)


def is_totally_strictly_refining(d: DecisionProblem, new_actions: Sequence) -> bool:
    return all(is_strictly_dominated(d, b) or is_strictly_refining(d, b) for b in new_actions)


# -- removals -----------------------------------------------------------------

def has_leftovers(d: DecisionProblem, kept) -> bool:
    kept = set(kept)
    if not kept:
        raise PreconditionError("the kept action set is empty")
    unknown = kept - set(d.labels)
    if unknown:
        raise PreconditionError(f"unknown action labels {sorted(unknown)}")
    return bool(kept & undominated_actions(d))


def is_consequential(d: DecisionProblem, dhat: DecisionProblem) -> bool:
    """Do the two value functions differ anywhere?"""
    if d.n != dhat.n:
        raise MalformedInputError("decision problems over different state spaces")
    mode = _joint_mode(d, dhat)
    v, vh = _align(d.value_fn(), mode), _align(dhat.value_fn(), mode)
    ref = common_refinement(subdivision_of(vh), subdivision_of(v))
    tol = _tol(mode)
    return any(abs(vh.evaluate(x) - v.evaluate(x)) > tol for x in ref.vertices())


# -- fixed prior ----------------------------------------------------------------

@dataclass(frozen=True)
class ShiftWitness:
    """Affine ``l(mu) = L . mu``; ``lam``/``tau`` are its chart coordinates
    (first state dropped): ``l = lam . mu[1:] + tau``."""

    L: tuple

    @property
    def tau(self):
        return self.L[0]

    @property
    def lam(self) -> tuple:
        return tuple(x - self.L[0] for x in self.L[1:])

    def __call__(self, mu):
        return dot(self.L, mu)


def lower_convex_envelope_at(w: CellwiseAffine, mu0: Sequence, mode: Mode | None = None):
    """Lower convex envelope of ``w`` at ``mu0`` from its subdivision's vertices."""
    mode = mode or w.subdivision.mode
    verts = w.subdivision.vertices()
    return _envelope(verts, [w.evaluate(x) for x in verts], mu0, mode)


def _envelope(verts, vals, mu0, mode):
    n = len(mu0)
    zero = coerce(0, mode)
    cons = [Constraint(tuple(coerce(x[i], mode) for x in verts), "=", coerce(mu0[i], mode))
            for i in range(n)]
    lp = LinearProgram(tuple(coerce(v, mode) for v in vals), tuple(cons),
                       tuple((zero, None) for _ in verts), "min")
    res = solve_lp(lp, mode)
    if res.status is not Status.OPTIMAL:
        raise PreconditionError("the prior lies outside the hull of the vertices")
    return res.value


def snap_prior(mu0: Sequence) -> tuple:
    """Rational copy of a float prior (shortest decimal form, renormalized)."""
    snapped = [coerce(x, Mode.EXACT) for x in mu0]
    snapped[-1] = 1 - sum(snapped[:-1])
    if snapped[-1] <= 0:
        raise PreconditionError("the prior must lie in the interior of the simplex")
    warnings.warn(f"float prior snapped to {[str(x) for x in snapped]} for exact analysis",
                  stacklevel=3)
    return tuple(snapped)


def shift_majorizes(vhat: MaxAffine, v: MaxAffine, mu0: Sequence):
    """Is there an affine ``l`` with ``vhat + l = v`` at ``mu0`` and ``>= v`` everywhere?

    Returns ``(True, ShiftWitness)`` or ``(False, gap)`` where ``gap`` is
    ``W(mu0)`` minus the lower convex envelope of ``W`` at ``mu0``.
    """
    w, vhat, v, mode = _difference(vhat, v)
    mu0 = validate_belief(mu0, v.n, mode if mode is Mode.FLOAT else None)
    if not is_interior(mu0):
        raise PreconditionError("the prior must lie in the interior of the simplex")
    if infer_mode(list(mu0)) is Mode.FLOAT and mode is Mode.EXACT:
        mu0 = snap_prior(mu0)
    mu0 = tuple(coerce(x, mode) for x in mu0)
    wfun = lambda mu: vhat.evaluate(mu) - v.evaluate(mu)
    verts = w.subdivision.vertices()
    if mode is Mode.FLOAT:
        verts = [tuple(float(x) for x in p) for p in verts]
    n = v.n
    tol = 0 if mode is Mode.EXACT else 1e-9
    cons = [Constraint(tuple(mu0), "=", -wfun(mu0))]
    cons += [Constraint(tuple(x), ">=", -wfun(x) - tol) for x in verts]
    lp = LinearProgram(tuple(coerce(0, mode) for _ in range(n)), tuple(cons), None, "max")
    res = solve_lp(lp, mode)
    if res.status is Status.OPTIMAL:
        return True, ShiftWitness(tuple(res.solution))
    env = _envelope(verts, [wfun(x) for x in verts], mu0, mode)
    return False, wfun(mu0) - env


def verify_shift_witness(vhat: MaxAffine, v: MaxAffine, mu0: Sequence, wit: ShiftWitness,
                         tol: float = 1e-9) -> bool:
    """Check both shift conditions at ``mu0`` and at every refinement vertex."""
    w = difference_function(vhat, v)
    f = lambda mu: vhat.evaluate(mu) + wit(mu) - v.evaluate(mu)
    if abs(f(mu0)) > tol:
        return False
    return all(f(x) >= -tol for x in w.subdivision.vertices())


def is_generic_prior(d: DecisionProblem, dhat: DecisionProblem, mu0: Sequence) -> bool:
    """``mu0`` lies in the interior of some ``C_i`` intersected with some ``Chat_j``."""
    mode = _joint_mode(d, dhat)
    if infer_mode(list(mu0)) is Mode.FLOAT:
        mode = Mode.FLOAT
    mu0 = tuple(coerce(x, mode) for x in mu0)
    tol = _tol(mode)
    ref = common_refinement(subdivision(dhat), subdivision(d))
    for c in ref.cells:
        hs = c.polytope.halfspaces
        if all(dot(a, mu0) < b - tol for a, b in hs) and all(x > tol for x in mu0):
            return True
    return False


# -- verdicts -------------------------------------------------------------------

@dataclass
class PriorReport:
    prior: tuple
    optimal_initial: tuple
    optimal_transformed: tuple
    some_action_remains_optimal: bool
    generic: bool
    shift_majorizes: bool
    shift_witness: Optional[ShiftWitness] = None
    envelope_gap: object = None
    advisory: list = field(default_factory=list)


@dataclass
class TransformationVerdict:
    convex_difference: bool
    refines: bool
    greater_value_free_prior: bool
    nonconvexity_witness: Optional[NonconvexityWitness] = None
    kind: str = "general"
    totally_refining: Optional[bool] = None
    totally_strictly_refining: Optional[bool] = None
    leftovers: Optional[bool] = None
    consequential: Optional[bool] = None
    priors: list = field(default_factory=list)

    @property
    def shift_majorizes_at(self) -> list:
        return [(p.prior, p.shift_witness) for p in self.priors if p.shift_majorizes]


def _transformation_kind(d: DecisionProblem, dhat: DecisionProblem) -> str:
    old = {a.label: a.payoffs for a in d.actions}
    new = {a.label: a.payoffs for a in dhat.actions}
    shared = set(old) & set(new)
    if any(old[k] != new[k] for k in shared):
        return "general"
    if set(new) > set(old):
        return "addition"
    if set(new) < set(old):
        return "removal"
    if set(new) == set(old):
        return "identity"
    return "general"


def classify_transformation(d: DecisionProblem, dhat: DecisionProblem,
                            priors: Sequence | None = None) -> TransformationVerdict:
    if d.n != dhat.n:
        raise MalformedInputError("decision problems over different state spaces")
    v, vh = d.value_fn(), dhat.value_fn()
    convex, witness = is_convex_difference(vh, v)
    ref = refines(subdivision(dhat), subdivision(d))
    verdict = TransformationVerdict(convex, ref, convex, witness, _transformation_kind(d, dhat))
    if verdict.kind == "addition":
        extra = [a.payoffs for a in dhat.actions if a.label not in set(d.labels)]
        verdict.totally_refining = is_totally_refining(d, extra)
        verdict.totally_strictly_refining = is_totally_strictly_refining(d, extra)
    elif verdict.kind == "removal":
        removed = [a.payoffs for a in d.actions if a.label not in set(dhat.labels)]
        # roles reversed: the removed actions judged against what is kept
        verdict.totally_refining = is_totally_refining(dhat, removed)
        verdict.leftovers = has_leftovers(d, dhat.labels)
        verdict.consequential = is_consequential(d, dhat)
    for mu0 in priors or ():
        verdict.priors.append(_prior_report(d, dhat, v, vh, mu0, verdict.kind))
    return verdict


def _prior_report(d, dhat, v, vh, mu0, kind) -> PriorReport:
    mu0 = validate_belief(mu0, d.n, None if infer_mode(list(mu0)) is Mode.EXACT else Mode.FLOAT)
    if not is_interior(mu0):
        raise PreconditionError("priors must lie in the interior of the simplex")
    a0 = sorted(value_at(d, mu0)[1])
    a1 = sorted(value_at(dhat, mu0)[1])
    some = bool(set(a0) & set(a1))
    generic = is_generic_prior(d, dhat, mu0)
    ok, info = shift_majorizes(vh, v, mu0)
    rep = PriorReport(tuple(mu0), tuple(a0), tuple(a1), some, generic, ok,
                      info if ok else None, None if ok else info)
    if kind == "addition" and some:
        rep.advisory.append("an action remains prior-optimal after adding actions: "
                            "greater value for information at this prior")
    if kind == "removal" and some and is_consequential(d, dhat):
        rep.advisory.append("consequential removal keeps a prior-optimal action: "
                            "no greater value for information at this prior")
    if kind == "removal" and generic and len(a0) == 1 and len(a1) == 1 and a0 != a1:
        dominated = is_weakly_dominated(
            DecisionProblem.build({a0[0]: d.payoff(a0[0])}, d.states), d.payoff(a1[0]))
        if not dominated and is_consequential(d, dhat):
            rep.advisory.append("generic prior, new prior-optimal action not dominated by the "
                                "old one: removal cannot raise the value of information here")
    return rep
