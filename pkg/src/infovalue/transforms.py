"""Transformations of decision problems: adding and removing actions, affine
rescaling, composition with a utility map, and the two-state perturbation
that breaks a refinement produced by a change in risk attitude."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .comparative import refines
from .decision import Action, DecisionProblem, subdivision
from .errors import InapplicableError, MalformedInputError, NumericDomainError
from .numeric import Mode, coerce, infer_mode


def add_actions(d: DecisionProblem, new, prefix: str = "b") -> DecisionProblem:
    """Union problem.  ``new`` is a mapping label -> payoffs or a list of payoff vectors."""
    if hasattr(new, "items"):
        items = list(new.items())
    else:
        taken = set(d.labels)
        items, k = [], 1
        for vec in new:
            while f"{prefix}{k}" in taken:
                k += 1
            items.append((f"{prefix}{k}", vec))
            taken.add(f"{prefix}{k}")
    clash = set(d.labels) & {str(l) for l, _ in items}
    if clash:
        raise MalformedInputError(f"duplicate action labels {sorted(clash)}")
    mode = Mode.EXACT if (d.mode is Mode.EXACT and infer_mode([list(v) for _, v in items])
                          is Mode.EXACT) else Mode.FLOAT
    acts = tuple(Action(a.label, tuple(coerce(x, mode) for x in a.payoffs)) for a in d.actions)
    acts += tuple(Action(str(l), tuple(coerce(x, mode) for x in v)) for l, v in items)
    return DecisionProblem(d.states, acts)


def remove_actions(d: DecisionProblem, labels) -> DecisionProblem:
    labels = set(labels)
    unknown = labels - set(d.labels)
    if unknown:
        raise MalformedInputError(f"unknown action labels {sorted(unknown)}")
    kept = tuple(a for a in d.actions if a.label not in labels)
    if not kept:
        raise MalformedInputError("cannot remove every action")
    return DecisionProblem(d.states, kept)


def restrict_actions(d: DecisionProblem, kept) -> DecisionProblem:
    return remove_actions(d, set(d.labels) - set(kept))


def affine_transform(d: DecisionProblem, k, s=0) -> DecisionProblem:
    """Payoffs ``k * u + s``."""
    if not k > 0:
        raise MalformedInputError("the scale k must be positive")
    mode = Mode.EXACT if (d.mode is Mode.EXACT and infer_mode([k, s]) is Mode.EXACT) else Mode.FLOAT
    k, s = coerce(k, mode), coerce(s, mode)
    return DecisionProblem(d.states, tuple(
        Action(a.label, tuple(k * coerce(x, mode) + s for x in a.payoffs)) for a in d.actions))


def cara_wealth_factor(alpha, w, w_hat) -> float:
    """Scale relating CARA payoffs at wealth ``w_hat`` to those at ``w``."""
    if not alpha > 0:
        raise MalformedInputError("alpha must be positive")
    return math.exp(-float(alpha) * (float(w_hat) - float(w)))


# -- utility maps -----------------------------------------------------------------

@dataclass(frozen=True)
class UtilityMap:
    """Named strictly increasing map ``phi``.

    ``identity``; ``affine`` (k, s): k x + s; ``exp`` (a): (1 - e^{-a x}) / a,
    concave for a > 0 and convex for a < 0; ``power`` (p, shift):
    (x + shift)^p; ``log`` (shift): ln(x + shift).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self) -> None:
        known = {"identity": 0, "affine": 2, "exp": 1, "power": 2, "log": 1}
        if self.kind not in known:
            raise MalformedInputError(f"unknown utility map {self.kind!r}")
        if len(self.params) != known[self.kind]:
            raise MalformedInputError(f"{self.kind} takes {known[self.kind]} parameters")
        if self.kind == "affine" and not self.params[0] > 0:
            raise MalformedInputError("affine map needs a positive slope")
        if self.kind == "exp" and self.params[0] == 0:
            raise MalformedInputError("exp map needs a nonzero coefficient")
        if self.kind == "power" and not self.params[0] > 0:
            raise MalformedInputError("power map needs a positive exponent")

    @property
    def exact(self) -> bool:
        return self.kind in ("identity", "affine")

    @property
    def shape(self) -> str:
        if self.kind in ("identity", "affine"):
            return "affine"
        if self.kind == "exp":
            return "concave" if self.params[0] > 0 else "convex"
        if self.kind == "power":
            p = self.params[0]
            return "affine" if p == 1 else ("concave" if p < 1 else "convex")
        return "concave"

    def __call__(self, x):
        if self.kind == "identity":
            return x
        if self.kind == "affine":
            k, s = self.params
            return k * x + s
        x = float(x)
        if self.kind == "exp":
            a = float(self.params[0])
            return -math.expm1(-a * x) / a
        if self.kind == "power":
            p, shift = (float(v) for v in self.params)
            if x + shift <= 0:
                raise NumericDomainError("power map evaluated outside its domain")
            return (x + shift) ** p
        shift = float(self.params[0])
        if x + shift <= 0:
            raise NumericDomainError("log map evaluated outside its domain")
        return math.log(x + shift)

    def inverse(self, y) -> float:
        if self.kind == "identity":
            return y
        if self.kind == "affine":
            k, s = self.params
            return (y - s) / k
        y = float(y)
        if self.kind == "exp":
            a = float(self.params[0])
            return -math.log1p(-a * y) / a
        if self.kind == "power":
            p, shift = (float(v) for v in self.params)
            return y ** (1 / p) - shift
        return math.exp(y) - float(self.params[0])


def _check_monotone(phi: UtilityMap, values: Sequence, samples: int = 64) -> None:
    lo, hi = float(min(values)), float(max(values))
    grid = sorted(set([float(v) for v in values] + list(np.linspace(lo, hi, samples))))
    ys = [float(phi(x)) for x in grid]
    if any(b <= a for a, b in zip(ys, ys[1:])):
        raise MalformedInputError("utility map is not strictly increasing on the payoff range")


def compose_utility(d: DecisionProblem, phi: UtilityMap, shape: str | None = None) -> DecisionProblem:
    """Apply ``phi`` to every payoff.  ``shape``, when given, must match the map's."""
    values = [x for a in d.actions for x in a.payoffs]
    _check_monotone(phi, values)
    if shape is not None and shape not in ("general", phi.shape):
        raise MalformedInputError(f"declared shape {shape!r} but the map is {phi.shape}")
    if phi.exact and d.mode is Mode.EXACT and all(
            isinstance(p, Fraction) or isinstance(p, int) for p in phi.params):
        conv = lambda x: phi(x)
    else:
        conv = lambda x: float(phi(x))
    return DecisionProblem(d.states, tuple(
        Action(a.label, tuple(conv(x) for x in a.payoffs)) for a in d.actions))


# -- the two-state perturbation --------------------------------------------------------

@dataclass
class PerturbationReport:
    case: str
    broken: bool
    epsilon: Any
    perturbed_action: str = ""
    perturbed_state: int = 0
    delta: Any = 0
    kinks_before: tuple = ()
    kinks_after: tuple = ()
    message: str = ""


def _kinks(d: DecisionProblem):
    """Cells of a two-state problem ordered by ``mu = P(second state)``:
    list of ``(lo, hi, labels)``."""
    cells = []
    for c in subdivision(d).cells:
        xs = [v[1] for v in c.vertices]
        cells.append((min(xs), max(xs), c.labels))
    cells.sort(key=lambda t: t[0])
    return cells


def perturb_break_refinement(d: DecisionProblem, phi: UtilityMap, eps=1e-4):
    """Nudge one payoff by ``eps`` so that the composed subdivision stops refining.

    Returns ``(perturbed problem, report)``.  The case is picked from how
    the first kink moves under ``phi``: unchanged with the neighbouring
    action still optimal (1a), unchanged with a new neighbour (1b), or
    moved left (2).
    """
    if d.n != 2:
        raise InapplicableError("the perturbation is defined for two states only")
    dh = compose_utility(d, phi)
    if not refines(subdivision(dh), subdivision(d)):
        raise InapplicableError("the composed subdivision does not refine the original")
    C, Ch = _kinks(d), _kinks(dh)
    if len(C) < 2:
        raise InapplicableError("the original subdivision has a single cell; nothing to break")
    a1, a2 = C[0][2][0], C[1][2][0]
    mu1, muh1 = C[0][1], Ch[0][1]
    tol = 1e-9
    if abs(float(mu1) - float(muh1)) <= tol:
        if a2 in Ch[1][2]:
            case, target, delta = "1a", a1, -eps
        else:
            case, target, delta = "1b", a2, eps
    elif float(muh1) < float(mu1):
        case, target, delta = "2", a1, eps
    else:
        raise InapplicableError("the first composed kink lies right of the original one")

    mode = Mode.EXACT if (d.mode is Mode.EXACT and infer_mode([eps]) is Mode.EXACT) else Mode.FLOAT
    delta = coerce(delta, mode)
    acts = []
    for a in d.actions:
        pay = [coerce(x, mode) for x in a.payoffs]
        if a.label == target:
            pay[0] = pay[0] + delta
        acts.append(Action(a.label, tuple(pay)))
    dp = DecisionProblem(d.states, tuple(acts))
    dph = compose_utility(dp, phi)
    broken = not refines(subdivision(dph), subdivision(dp))
    report = PerturbationReport(
        case=case, broken=broken, epsilon=eps, perturbed_action=target, perturbed_state=0,
        delta=delta, kinks_before=tuple(c[1] for c in C[:-1]),
        kinks_after=tuple(c[1] for c in _kinks(dp)[:-1]),
        message=f"case {case}: refinement broken" if broken
        else f"case {case}: no break found")
    return dp, report
