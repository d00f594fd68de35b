"""Arithmetic modes and scalar coercion.

Exact mode works over :class:`fractions.Fraction`; float mode over Python
floats.  Most operations infer the mode from their data: anything that is
entirely integers/fractions runs exactly, anything containing a float runs
in floating point.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Sequence, Union

Scalar = Union[Fraction, float]

STRICT_TOL = 1e-9
"""Float-mode threshold for every strict inequality in the package."""


class Mode(str, enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


def as_mode(mode: Mode | str | None) -> Mode | None:
    if mode is None or isinstance(mode, Mode):
        return mode
    return Mode(mode)


def is_exact_value(x: Any) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def infer_mode(*collections: Any) -> Mode:
    """EXACT iff every scalar found in the (nested) arguments is rational."""

    def walk(obj: Any) -> bool:
        if isinstance(obj, (list, tuple)):
            return all(walk(o) for o in obj)
        if hasattr(obj, "tolist") and not isinstance(obj, Fraction):
            return walk(obj.tolist())
        return is_exact_value(obj)

    return Mode.EXACT if all(walk(c) for c in collections) else Mode.FLOAT


def parse_scalar(value: Any) -> Fraction | float:
    """Parse a JSON scalar: ints and ``"p/q"``/decimal strings are exact."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return value
    raise TypeError(f"not a number: {value!r}")


def coerce(x: Any, mode: Mode | str) -> Scalar:
    """Convert a scalar to the representation used by ``mode``.

    Floats entering exact mode go through their shortest decimal repr, so
    ``1.1`` becomes ``11/10`` rather than its binary expansion.
    """
    mode = Mode(mode)
    if mode is Mode.EXACT:
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite value {x!r} in exact mode")
            return Fraction(repr(x))
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)
    return float(x)


def coerce_vector(xs: Iterable[Any], mode: Mode | str) -> tuple[Scalar, ...]:
    return tuple(coerce(x, mode) for x in xs)


def tolerance(mode: Mode | str) -> float:
    return 0.0 if Mode(mode) is Mode.EXACT else STRICT_TOL


def dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    total: Any = 0
    for x, y in zip(a, b):
        total += x * y
    return total


def format_scalar(x: Any) -> Any:
    """JSON-friendly scalar: integral fractions become ints, other
    fractions ``"p/q"`` strings, floats are rounded to 12 significant digits."""
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        y = float(f"{x:.12g}")
        return 0.0 if y == 0 else y
    return x
