"""Dense two-phase simplex with Bland's rule, exact or floating point.

Problems here are small (a few hundred rows at most, a few thousand
columns for the acquisition grids), so a dense tableau is used throughout.
The same code path serves both arithmetic modes: exact mode stores the
tableau as a numpy object array of :class:`~fractions.Fraction`, float mode
as ``float64``.

Certificates follow a single "box Lagrangian" convention over the
*original* constraint rows.  A row ``a.x <= b`` gets a multiplier ``>= 0``,
a row ``a.x >= b`` a multiplier ``<= 0`` and an equality a free one;
variable bounds never get multipliers of their own.

* Optimal (after converting a ``min`` problem to ``max -c.x``): multipliers
  ``y`` with ``value == y.b + max_{x in box} (c - A^T y).x``.
* Infeasible: a Farkas vector ``z`` with
  ``min_{x in box} (A^T z).x > z.b``.
* Unbounded: a recession direction of the feasible set that improves the
  objective.

:func:`verify_certificate` checks all three.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from .errors import MalformedInputError, NumericDomainError, PreconditionError
from .numeric import STRICT_TOL, Mode, Scalar, as_mode, coerce, infer_mode

RELATIONS = ("<=", "=", ">=")

_FLOAT_EPS = 1e-10


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    bound: Any


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` ``c.x`` subject to ``constraints`` and per-variable bounds.

    ``bounds`` is one ``(lo, hi)`` pair per variable, ``None`` meaning
    unbounded on that side.  When ``bounds`` itself is ``None`` every
    variable is free.
    """

    objective: tuple
    constraints: tuple[Constraint, ...] = ()
    bounds: Optional[tuple[tuple[Any, Any], ...]] = None
    sense: str = "max"

    def __post_init__(self) -> None:
        n = len(self.objective)
        if self.sense not in ("max", "min"):
            raise MalformedInputError(f"unknown sense {self.sense!r}")
        for k, con in enumerate(self.constraints):
            if len(con.coeffs) != n:
                raise MalformedInputError(
                    f"constraint {k} has {len(con.coeffs)} coefficients, objective has {n}"
                )
            if con.relation not in RELATIONS:
                raise MalformedInputError(f"constraint {k}: unknown relation {con.relation!r}")
        if self.bounds is not None and len(self.bounds) != n:
            raise MalformedInputError("one (lo, hi) bound pair is needed per variable")

    @classmethod
    def build(cls, objective, constraints=(), bounds=None, sense="max") -> "LinearProgram":
        cons = tuple(
            c if isinstance(c, Constraint) else Constraint(tuple(c[0]), c[1], c[2])
            for c in constraints
        )
        bnds = None if bounds is None else tuple((lo, hi) for lo, hi in bounds)
        return cls(tuple(objective), cons, bnds, sense)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def var_bounds(self) -> list[tuple[Any, Any]]:
        if self.bounds is None:
            return [(None, None)] * self.num_vars
        return list(self.bounds)

    def scalars(self):
        yield from self.objective
        for con in self.constraints:
            yield from con.coeffs
            yield con.bound
        for lo, hi in self.var_bounds():
            if lo is not None:
                yield lo
            if hi is not None:
                yield hi


@dataclass
class LPResult:
    status: Status
    solution: Optional[tuple] = None
    value: Any = None
    certificate: Optional[tuple] = None
    mode: Mode = Mode.FLOAT
    basis_size: int = 0
    reduced_costs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _check_finite(lp: LinearProgram) -> None:
    for x in lp.scalars():
        if isinstance(x, float) and not math.isfinite(x):
            raise NumericDomainError(f"non-finite coefficient {x!r}")


class _Tableau:
    """Standard form ``max c.x, A x = b, x >= 0, b >= 0`` plus bookkeeping."""

    def __init__(self, lp: LinearProgram, mode: Mode):
        self.mode = mode
        self.eps = 0 if mode is Mode.EXACT else _FLOAT_EPS
        zero = Fraction(0) if mode is Mode.EXACT else 0.0
        self.zero = zero
        conv = (lambda v: coerce(v, mode))
        n = lp.num_vars

        # x_j = offset_j + sum(sign * x'_k) over the columns of variable j
        self.offsets = []
        self.columns: list[tuple[int, int]] = []  # (original var, sign)
        ub_rows = []
        for j, (lo, hi) in enumerate(lp.var_bounds()):
            if lo is not None:
                lo = conv(lo)
                self.offsets.append(lo)
                self.columns.append((j, 1))
                if hi is not None:
                    ub_rows.append((len(self.columns) - 1, conv(hi) - lo))
            elif hi is not None:
                self.offsets.append(conv(hi))
                self.columns.append((j, -1))
            else:
                self.offsets.append(zero)
                self.columns.append((j, 1))
                self.columns.append((j, -1))
        nstruct = len(self.columns)

        rows = []  # (coeffs over structural cols, relation, rhs)
        for con in lp.constraints:
            a = [conv(v) for v in con.coeffs]
            rhs = conv(con.bound) - sum((a[j] * self.offsets[j] for j in range(n)), zero)
            coeffs = [a[j] * s for (j, s) in self.columns]
            rows.append((coeffs, con.relation, rhs))
        self.num_original_rows = len(rows)
        for col, cap in ub_rows:
            coeffs = [zero] * nstruct
            coeffs[col] = conv(1)
            rows.append((coeffs, "<=", cap))

        m = len(rows)
        nslack = sum(1 for r in rows if r[1] != "=")
        self.nstruct = nstruct
        self.art_start = nstruct + nslack
        ncols = self.art_start + m
        dtype = object if mode is Mode.EXACT else float
        T = np.empty((m, ncols + 1), dtype=dtype)
        T[:, :] = zero
        self.flipped = []
        s = nstruct
        for i, (coeffs, rel, rhs) in enumerate(rows):
            T[i, :nstruct] = coeffs
            if rel != "=":
                T[i, s] = conv(1) if rel == "<=" else conv(-1)
                s += 1
            T[i, -1] = rhs
            flip = rhs < 0
            if flip:
                T[i, :] = -T[i, :]
            self.flipped.append(flip)
            T[i, self.art_start + i] = conv(1)
        self.T = T
        self.m = m
        self.ncols = ncols
        self.basis = [self.art_start + i for i in range(m)]

        c = [zero] * ncols
        for k, (j, sgn) in enumerate(self.columns):
            cj = conv(lp.objective[j])
            c[k] = cj * sgn if lp.sense == "max" else -cj * sgn
        self.c_struct = np.array(c, dtype=dtype)

    # -- core pivoting ---------------------------------------------------
    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r, :] = T[r, :] / T[r, j]
        col = T[:, j].copy()
        col[r] = self.zero
        nz = np.nonzero(col != 0)[0] if self.mode is Mode.EXACT else np.nonzero(col)[0]
        if len(nz):
            T[nz, :] -= np.outer(col[nz], T[r, :])
        if self.mode is Mode.FLOAT:
            T[nz, j] = 0.0
        self.basis[r] = j

    def reduced_costs(self, c: np.ndarray) -> np.ndarray:
        cb = c[self.basis]
        return c - cb @ self.T[:, :-1]

    def run(self, c: np.ndarray, allow_art: bool) -> tuple[str, Optional[int]]:
        """Maximize ``c.x`` from the current basis.  Returns ('optimal', None)
        or ('unbounded', entering column)."""
        T = self.T
        limit = self.art_start if not allow_art else self.ncols
        eps = self.eps
        while True:
            d = self.reduced_costs(c)[:limit]
            cand = np.nonzero(d > eps)[0]
            if len(cand) == 0:
                return "optimal", None
            j = int(cand[0])
            colj = T[:, j]
            best_r, best_ratio = -1, None
            for i in np.nonzero(colj > eps)[0]:
                ratio = T[i, -1] / colj[i]
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[best_r])):
                    best_r, best_ratio = int(i), ratio
            if best_r < 0:
                return "unbounded", j
            self.pivot(best_r, j)

    def duals(self, c: np.ndarray) -> list:
        binv = self.T[:, self.art_start:self.art_start + self.m]
        y = c[self.basis] @ binv
        return [(-v if f else v) for v, f in zip(y, self.flipped)]

    def primal(self) -> list:
        x = [self.zero] * self.ncols
        for i, b in enumerate(self.basis):
            x[b] = self.T[i, -1]
        return x

    def to_original(self, xstd: Sequence, n: int, with_offset: bool = True) -> tuple:
        out = list(self.offsets) if with_offset else [self.zero] * n
        for k, (j, s) in enumerate(self.columns):
            out[j] = out[j] + s * xstd[k]
        return tuple(out)


def _resolve_mode(lp: LinearProgram, mode) -> Mode:
    mode = as_mode(mode)
    if mode is None:
        mode = infer_mode(list(lp.scalars()))
    return mode


def solve_lp(lp: LinearProgram, mode: Mode | str | None = None) -> LPResult:
    """Solve ``lp``; see the module docstring for certificate conventions."""
    if not isinstance(lp, LinearProgram):
        raise MalformedInputError("solve_lp expects a LinearProgram")
    _check_finite(lp)
    mode = _resolve_mode(lp, mode)
    tab = _Tableau(lp, mode)
    n = lp.num_vars
    dtype = object if mode is Mode.EXACT else float
    one = Fraction(1) if mode is Mode.EXACT else 1.0

    # phase 1: maximize -sum(artificials)
    c1 = np.empty(tab.ncols, dtype=dtype)
    c1[:] = tab.zero
    c1[tab.art_start:] = -one
    tab.run(c1, allow_art=False)
    phase1 = c1[tab.basis] @ tab.T[:, -1]
    scale = max([1.0] + [abs(float(v)) for v in tab.T[:, -1]])
    feas_tol = 0 if mode is Mode.EXACT else 1e-9 * scale
    if phase1 < -feas_tol:
        y = tab.duals(c1)[: tab.num_original_rows]
        return LPResult(Status.INFEASIBLE, certificate=tuple(y), mode=mode)

    # drive zero-level artificials out of the basis where possible
    for r in range(tab.m):
        if tab.basis[r] >= tab.art_start:
            row = tab.T[r, : tab.art_start]
            nz = np.nonzero(np.abs(row) > tab.eps if mode is Mode.FLOAT else row != 0)[0]
            if len(nz):
                tab.pivot(r, int(nz[0]))

    c2 = tab.c_struct.copy()
    outcome, entering = tab.run(c2, allow_art=False)
    if outcome == "unbounded":
        direction = [tab.zero] * tab.ncols
        direction[entering] = one
        for i, b in enumerate(tab.basis):
            direction[b] = -tab.T[i, entering]
        ray = tab.to_original(direction, n, with_offset=False)
        return LPResult(Status.UNBOUNDED, certificate=ray, mode=mode)

    x = tab.to_original(tab.primal(), n)
    value = sum((coerce(cj, mode) * xj for cj, xj in zip(lp.objective, x)), tab.zero)
    y = tab.duals(c2)[: tab.num_original_rows]
    if lp.sense == "min":
        y = [-v for v in y]
    rc = tab.reduced_costs(c2)[: tab.art_start]
    return LPResult(Status.OPTIMAL, solution=x, value=value, certificate=tuple(y),
                    mode=mode, basis_size=tab.m, reduced_costs=rc)


def _box_extreme(g: Scalar, lo, hi, want_max: bool):
    """max (or min) of g*x over lo <= x <= hi; None when unbounded."""
    if g == 0:
        return 0
    if want_max:
        end = hi if g > 0 else lo
    else:
        end = lo if g > 0 else hi
    return None if end is None else g * end


def verify_certificate(lp: LinearProgram, result: LPResult, tol: float | None = None) -> bool:
    """Independent check of a solver result against ``lp``'s raw data."""
    mode = result.mode
    if tol is None:
        tol = 0 if mode is Mode.EXACT else 1e-7
    conv = (lambda v: coerce(v, mode))
    A = [[conv(v) for v in con.coeffs] for con in lp.constraints]
    b = [conv(con.bound) for con in lp.constraints]
    bounds = [(None if lo is None else conv(lo), None if hi is None else conv(hi))
              for lo, hi in lp.var_bounds()]
    n = lp.num_vars

    def sign_ok(y):
        for yi, con in zip(y, lp.constraints):
            if con.relation == "<=" and yi < -tol:
                return False
            if con.relation == ">=" and yi > tol:
                return False
        return True

    def feasible(x):
        for (lo, hi), xj in zip(bounds, x):
            if lo is not None and xj < lo - tol:
                return False
            if hi is not None and xj > hi + tol:
                return False
        for row, con, bi in zip(A, lp.constraints, b):
            lhs = sum(a * xj for a, xj in zip(row, x))
            if con.relation == "<=" and lhs > bi + tol:
                return False
            if con.relation == ">=" and lhs < bi - tol:
                return False
            if con.relation == "=" and abs(lhs - bi) > tol:
                return False
        return True

    if result.status is Status.INFEASIBLE:
        z = result.certificate
        if z is None or not sign_ok(z):
            return False
        total = 0
        for j in range(n):
            g = sum(z[i] * A[i][j] for i in range(len(A)))
            if abs(g) <= tol:
                continue
            ext = _box_extreme(g, *bounds[j], want_max=False)
            if ext is None:
                return False
            total += ext
        zb = sum(zi * bi for zi, bi in zip(z, b))
        return total > zb + tol

    if result.status is Status.UNBOUNDED:
        d = result.certificate
        c = [conv(v) for v in lp.objective]
        gain = sum(cj * dj for cj, dj in zip(c, d))
        if lp.sense == "min":
            gain = -gain
        if gain <= tol:
            return False
        for (lo, hi), dj in zip(bounds, d):
            if (lo is not None and dj < -tol) or (hi is not None and dj > tol):
                return False
        for row, con in zip(A, lp.constraints):
            ad = sum(a * dj for a, dj in zip(row, d))
            if (con.relation == "<=" and ad > tol) or (con.relation == ">=" and ad < -tol) \
                    or (con.relation == "=" and abs(ad) > tol):
                return False
        return True

    x, y = result.solution, result.certificate
    if not feasible(x):
        return False
    c = [conv(v) for v in lp.objective]
    if lp.sense == "min":
        c = [-v for v in c]
        y = [-v for v in y]
    if not sign_ok(y):
        return False
    bound = sum(yi * bi for yi, bi in zip(y, b))
    for j in range(n):
        r = c[j] - sum(y[i] * A[i][j] for i in range(len(A)))
        if abs(r) <= tol:
            continue
        ext = _box_extreme(r, *bounds[j], want_max=True)
        if ext is None:
            return False
        bound += ext
    value = sum(cj * xj for cj, xj in zip(c, x))
    return abs(bound - value) <= tol * max(1.0, abs(float(value)))


# -- strict feasibility ------------------------------------------------------

def max_min_slack(rows, strict_mask=None, domain=None, n: int | None = None,
                  mode: Mode | str | None = None, cap: Scalar = 1):
    """Maximize the smallest slack ``b - a.mu`` over the strict rows.

    ``mu`` ranges over the probability simplex intersected with ``domain``
    (anything exposing ``n`` and ``halfspaces`` as ``(normal, offset)``
    pairs) and with the non-strict rows.  Returns ``(t, mu)`` with ``t``
    capped at ``cap``; raises :class:`PreconditionError` when the domain is
    empty.
    """
    rows = [(tuple(a), b) for a, b in rows]
    if strict_mask is None:
        strict_mask = [True] * len(rows)
    if n is None:
        n = domain.n if domain is not None else len(rows[0][0])
    halfspaces = list(domain.halfspaces) if domain is not None else []
    if mode is None:
        mode = infer_mode([r[0] for r in rows], [r[1] for r in rows],
                          [h[0] for h in halfspaces], [h[1] for h in halfspaces], cap)
    mode = Mode(mode)
    conv = (lambda v: coerce(v, mode))
    one, zero = conv(1), conv(0)
    cons = []
    for (a, b), strict in zip(rows, strict_mask):
        if len(a) != n:
            raise MalformedInputError("row dimension does not match the belief dimension")
        coeffs = [conv(v) for v in a] + [one if strict else zero]
        cons.append(Constraint(tuple(coeffs), "<=", conv(b)))
    for normal, offset in halfspaces:
        cons.append(Constraint(tuple(conv(v) for v in normal) + (zero,), "<=", conv(offset)))
    cons.append(Constraint(tuple([one] * n + [zero]), "=", one))
    bounds = tuple([(zero, None)] * n + [(None, conv(cap))])
    lp = LinearProgram(tuple([zero] * n + [one]), tuple(cons), bounds, "max")
    res = solve_lp(lp, mode)
    if res.status is not Status.OPTIMAL:
        raise PreconditionError("strict_feasibility: the domain is empty")
    return res.value, tuple(res.solution[:n])


def strict_feasibility(rows, strict_mask=None, domain=None, n: int | None = None,
                       mode: Mode | str | None = None, tol: float = STRICT_TOL):
    """Is there a belief in ``domain`` meeting every strict row strictly?

    Rows are ``(a, b)`` meaning ``a.mu <= b`` (``< b`` when strict).
    Returns ``(found, witness)``; exact mode demands a literally positive
    slack, float mode a slack above ``tol``.
    """
    t, mu = max_min_slack(rows, strict_mask, domain, n=n, mode=mode)
    if isinstance(t, Fraction):
        return t > 0, mu
    return t > tol, mu


SCREEN_MARGIN = 1e-7


def _screened_slack(rows, n, mode):
    """Optimal min-slack, from a float solve when that is decisive.

    In exact mode a float LP runs first; its value is trusted only when it
    clears ``SCREEN_MARGIN`` in absolute value (float error on these small
    problems is many orders smaller), otherwise the exact LP decides.
    """
    if mode is Mode.EXACT:
        t, _ = max_min_slack(rows, None, n=n, mode=Mode.FLOAT)
        if abs(t) > SCREEN_MARGIN:
            return Fraction(1 if t > 0 else -1)
    t, _ = max_min_slack(rows, None, n=n, mode=mode)
    return t


def decide_strict(rows, n: int, mode: Mode | str | None = None, tol: float = STRICT_TOL) -> bool:
    """Boolean form of :func:`strict_feasibility` (all rows strict, no witness)."""
    mode = Mode(mode) if mode is not None else infer_mode([r[0] for r in rows], [r[1] for r in rows])
    t = _screened_slack(rows, n, mode)
    return t > 0 if mode is Mode.EXACT else t > tol


def decide_negative_slack(rows, n: int, mode: Mode | str | None = None,
                          tol: float = STRICT_TOL) -> bool:
    """Is every belief violating some row strictly (optimal min-slack below zero)?"""
    mode = Mode(mode) if mode is not None else infer_mode([r[0] for r in rows], [r[1] for r in rows])
    t = _screened_slack(rows, n, mode)
    return t < 0 if mode is Mode.EXACT else t < -tol
