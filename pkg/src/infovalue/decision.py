"""Finite decision problems, value functions and their subdivisions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence

from .errors import MalformedInputError, PreconditionError, RepresentationError
from .geometry import (Polytope, dedupe_points, is_interior, validate_belief)
from .lp import decide_strict
from .numeric import STRICT_TOL, Mode, coerce, dot, infer_mode


@dataclass(frozen=True)
class Action:
    label: str
    payoffs: tuple


@dataclass(frozen=True)
class DecisionProblem:
    """States ``Theta`` and actions with payoff vectors ``u(a, .)``."""

    states: tuple
    actions: tuple

    def __post_init__(self) -> None:
        if len(self.states) < 2:
            raise MalformedInputError("a decision problem needs at least two states")
        if not self.actions:
            raise MalformedInputError("a decision problem needs at least one action")
        labels = [a.label for a in self.actions]
        if len(set(labels)) != len(labels):
            raise MalformedInputError("action labels must be unique")
        for a in self.actions:
            if len(a.payoffs) != len(self.states):
                raise MalformedInputError(
                    f"action {a.label!r} has {len(a.payoffs)} payoffs for {len(self.states)} states")
            for x in a.payoffs:
                if isinstance(x, float) and not math.isfinite(x):
                    raise MalformedInputError(f"action {a.label!r} has a non-finite payoff")

    @classmethod
    def build(cls, actions, states: Sequence | None = None) -> "DecisionProblem":
        """``actions`` is a mapping label -> payoffs or a list of pairs."""
        items = list(actions.items()) if hasattr(actions, "items") else list(actions)
        if not items:
            raise MalformedInputError("a decision problem needs at least one action")
        n = len(items[0][1])
        if states is None:
            states = tuple(f"s{i}" for i in range(n))
        mode = infer_mode([list(p) for _, p in items])
        acts = tuple(Action(str(lbl), tuple(coerce(x, mode) for x in pay)) for lbl, pay in items)
        return cls(tuple(states), acts)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def labels(self) -> tuple:
        return tuple(a.label for a in self.actions)

    @cached_property
    def mode(self) -> Mode:
        return infer_mode([list(a.payoffs) for a in self.actions])

    def payoff(self, label: str) -> tuple:
        for a in self.actions:
            if a.label == label:
                return a.payoffs
        raise KeyError(label)

    def value_fn(self) -> "MaxAffine":
        return MaxAffine(tuple((a.payoffs, a.label) for a in self.actions))

    def with_mode(self, mode: Mode | str) -> "DecisionProblem":
        mode = Mode(mode)
        return DecisionProblem(self.states, tuple(
            Action(a.label, tuple(coerce(x, mode) for x in a.payoffs)) for a in self.actions))


@dataclass(frozen=True)
class MaxAffine:
    """``f(mu) = max_k piece_k . mu`` with labelled pieces."""

    pieces: tuple

    def __post_init__(self) -> None:
        if not self.pieces:
            raise MalformedInputError("a max-affine function needs at least one piece")
        n = len(self.pieces[0][0])
        if any(len(p) != n for p, _ in self.pieces):
            raise MalformedInputError("pieces have different dimensions")

    @classmethod
    def of(cls, vectors: Iterable, labels: Iterable | None = None) -> "MaxAffine":
        vectors = [tuple(v) for v in vectors]
        if labels is None:
            labels = [f"p{i}" for i in range(len(vectors))]
        return cls(tuple(zip(vectors, labels)))

    @property
    def n(self) -> int:
        return len(self.pieces[0][0])

    @cached_property
    def mode(self) -> Mode:
        return infer_mode([list(p) for p, _ in self.pieces])

    def evaluate(self, mu: Sequence):
        return max(dot(p, mu) for p, _ in self.pieces)

    __call__ = evaluate

    def argmax(self, mu: Sequence, tol: float | None = None) -> tuple:
        vals = [dot(p, mu) for p, _ in self.pieces]
        best = max(vals)
        if tol is None:
            exact = self.mode is Mode.EXACT and infer_mode(list(mu)) is Mode.EXACT
            tol = 0 if exact else STRICT_TOL
        return tuple(lbl for (p, lbl), v in zip(self.pieces, vals) if v >= best - tol)

    def vectors(self) -> list:
        return [p for p, _ in self.pieces]

    def with_mode(self, mode: Mode | str) -> "MaxAffine":
        mode = Mode(mode)
        return MaxAffine(tuple((tuple(coerce(x, mode) for x in p), l) for p, l in self.pieces))

    def plus_affine(self, vec: Sequence) -> "MaxAffine":
        return MaxAffine(tuple((tuple(a + b for a, b in zip(p, vec)), l) for p, l in self.pieces))

    def scaled(self, k) -> "MaxAffine":
        return MaxAffine(tuple((tuple(k * a for a in p), l) for p, l in self.pieces))

    def union(self, other: "MaxAffine") -> "MaxAffine":
        return MaxAffine(self.pieces + other.pieces)


@dataclass(frozen=True, eq=False)
class Cell:
    """One full-dimensional piece of a subdivision.

    ``payoff`` is the affine piece active on the cell (``None`` for cells of
    a bare refinement); ``parents`` indexes the cells a refinement cell
    came from.
    """

    labels: tuple
    polytope: Polytope
    payoff: Optional[tuple] = None
    parents: tuple = ()

    @property
    def label(self) -> str:
        return "+".join(self.labels)

    @property
    def vertices(self) -> tuple:
        return self.polytope.vertices


@dataclass(frozen=True, eq=False)
class Subdivision:
    n: int
    cells: tuple
    mode: Mode = Mode.EXACT
    source: object = None

    def vertices(self) -> list:
        return dedupe_points((v for c in self.cells for v in c.vertices), self.mode)

    def locate(self, mu: Sequence) -> int:
        """Index of the first cell containing ``mu``."""
        for k, c in enumerate(self.cells):
            if c.polytope.satisfies(mu):
                return k
        raise ValueError("belief lies in no cell")

    def labels(self) -> list:
        return [c.labels for c in self.cells]


@dataclass(frozen=True, eq=False)
class CellwiseAffine:
    """An affine piece per cell of a subdivision."""

    subdivision: Subdivision
    pieces: tuple

    def evaluate(self, mu: Sequence):
        return dot(self.pieces[self.subdivision.locate(mu)], mu)

    __call__ = evaluate

    def is_continuous(self) -> bool:
        """Pieces agree at every vertex shared by two cells."""
        tol = 0 if self.subdivision.mode is Mode.EXACT else 1e-9
        vals: dict = {}
        for cell, piece in zip(self.subdivision.cells, self.pieces):
            for v in cell.vertices:
                key = tuple(v) if self.subdivision.mode is Mode.EXACT else tuple(round(float(x), 9) for x in v)
                val = dot(piece, v)
                if key in vals and abs(vals[key] - val) > tol:
                    return False
                vals.setdefault(key, val)
        return True


# -- operations ------------------------------------------------------------

def _distinct_vectors(f: MaxAffine) -> list:
    """Distinct payoff vectors in first-appearance order with merged labels."""
    out: list = []
    for vec, lbl in f.pieces:
        for entry in out:
            if entry[0] == vec:
                entry[1].append(lbl)
                break
        else:
            out.append((vec, [lbl]))
    return [(v, tuple(l)) for v, l in out]


def undominated_vectors(f: MaxAffine) -> list:
    """``(vector, labels)`` for each distinct piece that is the unique max somewhere."""
    groups = _distinct_vectors(f)
    if len(groups) == 1:
        return groups
    mode = f.mode
    keep = []
    for i, (u, lbls) in enumerate(groups):
        rows = [(tuple(coerce(b, mode) - coerce(a, mode) for a, b in zip(u, w)), coerce(0, mode))
                for j, (w, _) in enumerate(groups) if j != i]
        if decide_strict(rows, f.n, mode):
            keep.append((u, lbls))
    return keep


def undominated_actions(d: DecisionProblem) -> frozenset:
    return frozenset(l for _, lbls in undominated_vectors(d.value_fn()) for l in lbls)


def value_at(d: DecisionProblem, mu: Sequence):
    """``(V(mu), argmax labels)``."""
    mu = validate_belief(mu, d.n, None if d.mode is Mode.EXACT else Mode.FLOAT)
    if d.mode is Mode.EXACT and infer_mode(list(mu)) is Mode.EXACT:
        f = d.value_fn()
        return f.evaluate(mu), frozenset(f.argmax(mu, 0))
    f = d.with_mode(Mode.FLOAT).value_fn()
    mu = tuple(float(x) for x in mu)
    return f.evaluate(mu), frozenset(f.argmax(mu, STRICT_TOL))


def optimal_action_set(d: DecisionProblem, mu0: Sequence) -> frozenset:
    if len(mu0) == d.n and not is_interior(mu0):
        raise PreconditionError("the prior must lie in the interior of the simplex")
    return value_at(d, mu0)[1]


@lru_cache(maxsize=1024)
def _cells_of(f: MaxAffine) -> tuple:
    groups = undominated_vectors(f)
    mode = f.mode
    cells = []
    for i, (u, lbls) in enumerate(groups):
        hs = [(tuple(coerce(b, mode) - coerce(a, mode) for a, b in zip(u, w)), 0)
              for j, (w, _) in enumerate(groups) if j != i]
        cells.append(Cell(lbls, Polytope.make(f.n, hs, mode), tuple(u)))
    return tuple(cells)


def subdivision_of(f: MaxAffine, source: object = None) -> Subdivision:
    """One cell per undominated distinct piece of ``f``."""
    return Subdivision(f.n, _cells_of(f), f.mode, source)


def subdivision(d: DecisionProblem) -> Subdivision:
    return subdivision_of(d.value_fn(), d)


def restrict_to_cellwise(f: MaxAffine, s: Subdivision) -> CellwiseAffine:
    """Attach to each cell of ``s`` the piece of ``f`` active on it."""
    tol = 0 if (f.mode is Mode.EXACT and s.mode is Mode.EXACT) else 1e-9
    pieces = []
    for cell in s.cells:
        y = cell.polytope.centroid()
        vals = [(dot(p, y), p) for p, _ in f.pieces]
        best = max(v for v, _ in vals)
        cand = [p for v, p in vals if v >= best - tol]
        for p in cand:
            if all(abs(f.evaluate(v) - dot(p, v)) <= tol for v in cell.vertices):
                pieces.append(p)
                break
        else:
            raise RepresentationError(f"function is not affine on cell {cell.label!r}")
    return CellwiseAffine(s, tuple(pieces))
