"""Polytopes inside the belief simplex.

A :class:`Polytope` is a finite list of halfspaces ``normal . mu <= offset``
always intersected with the probability simplex.  Vertices are found by
brute force over (n-1)-subsets of the active constraints, which is cheap at
the sizes used here (n <= 4, a few dozen halfspaces).

Halfspace normals are projected onto the tangent space of the simplex on
construction, so a constraint that is constant on the simplex either
disappears (when always satisfied) or marks the polytope as empty.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import MalformedInputError
from .numeric import STRICT_TOL, Mode, coerce, infer_mode

DEDUP_TOL = 1e-9


def _tangent(normal: Sequence, offset, mode: Mode):
    n = len(normal)
    normal = [coerce(v, mode) for v in normal]
    offset = coerce(offset, mode)
    mean = sum(normal, coerce(0, mode)) / n
    return tuple(v - mean for v in normal), offset - mean


def _is_zero(vec, mode: Mode) -> bool:
    if mode is Mode.EXACT:
        return all(v == 0 for v in vec)
    return all(abs(v) <= 1e-14 for v in vec)


@dataclass(frozen=True, eq=False)
class Polytope:
    """``{mu in simplex : normal . mu <= offset for every halfspace}``."""

    n: int
    halfspaces: tuple = ()
    mode: Mode = Mode.EXACT
    infeasible: bool = False

    @classmethod
    def make(cls, n: int, halfspaces: Iterable = (), mode: Mode | str | None = None) -> "Polytope":
        hs = [(tuple(a), b) for a, b in halfspaces]
        for a, _ in hs:
            if len(a) != n:
                raise MalformedInputError(f"halfspace normal of length {len(a)} in a {n}-state simplex")
        if n < 1:
            raise MalformedInputError("a simplex needs at least one state")
        mode = Mode(mode) if mode is not None else infer_mode([a for a, _ in hs], [b for _, b in hs])
        kept, seen, empty = [], set(), False
        for a, b in hs:
            a, b = _tangent(a, b, mode)
            if _is_zero(a, mode):
                if b < 0 and (mode is Mode.EXACT or b < -STRICT_TOL):
                    empty = True
                continue
            key = (a, b)
            if key in seen:
                continue
            seen.add(key)
            kept.append(key)
        return cls(n, tuple(kept), mode, empty)

    @cached_property
    def vertices(self) -> tuple:
        return tuple(enumerate_vertices(self))

    def satisfies(self, mu: Sequence, tol: float | None = None) -> bool:
        if self.infeasible:
            return False
        if tol is None:
            exact = self.mode is Mode.EXACT and not any(isinstance(x, float) for x in mu)
            tol = 0 if exact else STRICT_TOL
        if any(x < -tol for x in mu):
            return False
        return all(sum(a * x for a, x in zip(normal, mu)) <= off + tol
                   for normal, off in self.halfspaces)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def centroid(self) -> tuple:
        verts = self.vertices
        if not verts:
            raise ValueError("centroid of an empty polytope")
        k = len(verts)
        return tuple(sum(v[i] for v in verts) / k for i in range(self.n))


def simplex(n: int, mode: Mode | str = Mode.EXACT) -> Polytope:
    return Polytope.make(n, (), mode)


def interval(lo, hi, mode: Mode | str | None = None) -> Polytope:
    """Segment ``lo <= mu_2 <= hi`` of the 1-simplex (``mu_2`` = P(second state))."""
    return Polytope.make(2, [((0, -1), -lo), ((0, 1), hi)], mode)


def _solve_exact(A: list, b: list) -> Optional[list]:
    """Gauss-Jordan over Fractions; ``None`` when singular."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _all_rows(p: Polytope) -> list:
    """Halfspaces plus the nonnegativity constraints ``-mu_i <= 0``."""
    zero, one = coerce(0, p.mode), coerce(1, p.mode)
    rows = list(p.halfspaces)
    for i in range(p.n):
        rows.append((tuple(-one if j == i else zero for j in range(p.n)), zero))
    return rows


def enumerate_vertices(p: Polytope) -> list:
    """All extreme points of ``p``; empty list for an empty polytope.

    Output is sorted (lexicographically) so it does not depend on the order
    in which halfspaces were supplied.
    """
    if p.infeasible:
        return []
    n, mode = p.n, p.mode
    rows = _all_rows(p)
    one = coerce(1, mode)
    if n == 1:
        pt = (one,)
        return [pt] if p.satisfies(pt) else []
    found = []
    if mode is Mode.EXACT:
        for combo in itertools.combinations(range(len(rows)), n - 1):
            A = [list(rows[k][0]) for k in combo] + [[one] * n]
            b = [rows[k][1] for k in combo] + [one]
            x = _solve_exact(A, b)
            if x is None:
                continue
            pt = tuple(x)
            if p.satisfies(pt) and pt not in found:
                found.append(pt)
        return sorted(found)

    R = np.array([r[0] for r in rows], dtype=float)
    B = np.array([r[1] for r in rows], dtype=float)
    combos = np.array(list(itertools.combinations(range(len(rows)), n - 1)), dtype=int)
    if len(combos) == 0:
        return []
    A = np.empty((len(combos), n, n))
    A[:, : n - 1, :] = R[combos]
    A[:, n - 1, :] = 1.0
    rhs = np.empty((len(combos), n))
    rhs[:, : n - 1] = B[combos]
    rhs[:, n - 1] = 1.0
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-12
    if not ok.any():
        return []
    X = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
    slack_ok = (R @ X.T <= B[:, None] + STRICT_TOL).all(axis=0) & (X >= -STRICT_TOL).all(axis=1)
    pts = []
    for x in X[slack_ok]:
        x = np.clip(x, 0.0, None)
        x = x / x.sum()
        if all(np.linalg.norm(x - q) >= DEDUP_TOL for q in pts):
            pts.append(x)
    return sorted(tuple(float(v) for v in x) for x in pts)


def contains(outer: Polytope, inner: Polytope, tol: float | None = None) -> bool:
    """Every vertex of ``inner`` satisfies every halfspace of ``outer``."""
    return all(outer.satisfies(v, tol) for v in inner.vertices)


def intersect(p: Polytope, q: Polytope) -> Polytope:
    if p.n != q.n:
        raise MalformedInputError("polytopes live in simplices of different dimension")
    mode = Mode.EXACT if (p.mode is Mode.EXACT and q.mode is Mode.EXACT) else Mode.FLOAT
    poly = Polytope.make(p.n, list(p.halfspaces) + list(q.halfspaces), mode)
    if p.infeasible or q.infeasible:
        return Polytope(poly.n, poly.halfspaces, mode, True)
    return poly


def is_full_dimensional(p: Polytope) -> bool:
    """``p`` has nonempty interior relative to the simplex."""
    if p.infeasible or p.is_empty:
        return False
    if p.n == 1 or not p.halfspaces:
        return True
    return affine_rank(p.vertices, p.mode) == p.n - 1


def affine_rank(points: Sequence, mode: Mode | str = Mode.EXACT) -> int:
    """Dimension of the affine hull of ``points``."""
    pts = list(points)
    if not pts:
        return -1
    base = pts[0]
    diffs = [[a - b for a, b in zip(q, base)] for q in pts[1:]]
    if not diffs:
        return 0
    if Mode(mode) is Mode.FLOAT:
        return int(np.linalg.matrix_rank(np.array(diffs, dtype=float), tol=1e-9))
    rows = [list(r) for r in diffs]
    rank, col, ncols = 0, 0, len(rows[0])
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def same_points(p: Polytope, q: Polytope) -> bool:
    return contains(p, q) and contains(q, p)


# -- charts and measures ---------------------------------------------------

def chart(mu: Sequence) -> tuple:
    """Coordinates of a belief with the first state's probability dropped."""
    return tuple(mu[1:])


def volume(p: Polytope):
    """(n-1)-dimensional measure of ``p`` in chart coordinates (n <= 3)."""
    verts = p.vertices
    if p.n == 1:
        return coerce(1 if verts else 0, p.mode)
    if p.n == 2:
        if len(verts) < 2:
            return coerce(0, p.mode)
        xs = [v[1] for v in verts]
        return max(xs) - min(xs)
    if p.n == 3:
        pts = [chart(v) for v in verts]
        if len(pts) < 3:
            return coerce(0, p.mode)
        cx = sum(float(x) for x, _ in pts) / len(pts)
        cy = sum(float(y) for _, y in pts) / len(pts)
        pts.sort(key=lambda q: math.atan2(float(q[1]) - cy, float(q[0]) - cx))
        area = coerce(0, p.mode)
        for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
            area += x1 * y2 - x2 * y1
        return abs(area) / 2
    raise NotImplementedError("volume is only implemented for n <= 3")


def segment_breaks(halfspaces: Iterable, start: Sequence, end: Sequence) -> list:
    """Parameters ``s`` in (0, 1) where ``start + s (end - start)`` crosses a hyperplane."""
    out = []
    d = [e - s for s, e in zip(start, end)]
    for normal, off in halfspaces:
        den = sum(a * x for a, x in zip(normal, d))
        if den == 0:
            continue
        s = (off - sum(a * x for a, x in zip(normal, start))) / den
        if 0 < s < 1:
            out.append(s)
    return out


def dedupe_points(points: Iterable, mode: Mode) -> list:
    out = []
    if mode is Mode.EXACT:
        seen = set()
        for p in points:
            t = tuple(p)
            if t not in seen:
                seen.add(t)
                out.append(t)
        return sorted(out)
    for p in points:
        t = tuple(float(v) for v in p)
        if all(max(abs(a - b) for a, b in zip(t, q)) >= DEDUP_TOL for q in out):
            out.append(t)
    return sorted(out)


def validate_belief(mu: Sequence, n: int, mode: Mode | None = None) -> tuple:
    """Check length, nonnegativity and unit mass; returns the coerced belief."""
    if len(mu) != n:
        raise MalformedInputError(f"belief has {len(mu)} entries, expected {n}")
    if mode is None:
        mode = infer_mode(list(mu))
    mu = tuple(coerce(x, mode) for x in mu)
    tol = 0 if mode is Mode.EXACT else 1e-9
    if any(x < -tol for x in mu):
        raise MalformedInputError("belief has a negative entry")
    total = sum(mu)
    if abs(total - 1) > tol:
        raise MalformedInputError(f"belief sums to {total}, not 1")
    if mode is Mode.FLOAT:
        mu = tuple(max(x, 0.0) / total for x in mu)
    return mu


def is_interior(mu: Sequence) -> bool:
    return all(x > 0 for x in mu)
