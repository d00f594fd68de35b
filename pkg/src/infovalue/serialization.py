"""JSON and CSV formats for problems, costs, distributions and reports.

Numbers may be JSON numbers or strings; integers, ``"p/q"`` and decimal
strings are read exactly, JSON floats stay floats.  Output is canonical:
sorted keys, fractions as ``"p/q"``, floats at 12 significant digits.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .acquisition import (AffineShiftOfValue, MaxParaboloid, PosteriorDistribution, Quadratic,
                          ScaledEntropy, UPSCost)
from .decision import Action, DecisionProblem, MaxAffine
from .errors import MalformedInputError
from .numeric import coerce, format_scalar, infer_mode, parse_scalar


class ParseError(MalformedInputError):
    """Malformed document; ``line``/``column`` point into the source when known."""

    def __init__(self, message: str, source: str = "<input>", line: int | None = None,
                 column: int | None = None, path: str = ""):
        self.source, self.line, self.column, self.path = source, line, column, path
        where = source
        if line is not None:
            where += f":{line}:{column}"
        if path:
            where += f" at {path}"
        super().__init__(f"{where}: {message}")


# -- reading ------------------------------------------------------------------------

def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source, exc.lineno, exc.colno) from None


def load_file(path: str | os.PathLike) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", str(path)) from None
    return loads(text, str(path))


def _scalar(x: Any, where: str, source: str):
    try:
        return parse_scalar(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"expected a number, got {x!r}", source, path=where) from None


def _vector(xs: Any, where: str, source: str) -> tuple:
    if not isinstance(xs, list) or not xs:
        raise ParseError("expected a nonempty list of numbers", source, path=where)
    vals = [_scalar(x, f"{where}[{i}]", source) for i, x in enumerate(xs)]
    mode = infer_mode(vals)
    return tuple(coerce(v, mode) for v in vals)


def _field(doc: dict, key: str, where: str, source: str):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", source, path=where or "$")
    if key not in doc:
        raise ParseError(f"missing field {key!r}", source, path=where or "$")
    return doc[key]


def problem_from_json(doc: Any, source: str = "<input>") -> DecisionProblem:
    """``{"states": [...], "actions": [{"label": ..., "payoffs": [...]}]}``."""
    states = _field(doc, "states", "", source)
    actions = _field(doc, "actions", "", source)
    if not isinstance(states, list) or not isinstance(actions, list):
        raise ParseError("'states' and 'actions' must be lists", source, path="$")
    items = []
    for k, a in enumerate(actions):
        where = f"$.actions[{k}]"
        label = _field(a, "label", where, source)
        items.append((str(label), _vector(_field(a, "payoffs", where, source),
                                          where + ".payoffs", source)))
    mode = infer_mode([list(p) for _, p in items])
    try:
        return DecisionProblem(tuple(str(s) for s in states), tuple(
            Action(l, tuple(coerce(x, mode) for x in p)) for l, p in items))
    except MalformedInputError as exc:
        raise ParseError(str(exc), source, path="$") from None


def problem_to_json(d: DecisionProblem) -> dict:
    return {"states": list(d.states),
            "actions": [{"label": a.label, "payoffs": list(a.payoffs)} for a in d.actions]}


def value_fn_from_json(doc: Any, source: str = "<input>") -> MaxAffine:
    """A problem document or a bare list of payoff vectors."""
    if isinstance(doc, dict):
        return problem_from_json(doc, source).value_fn()
    if not isinstance(doc, list) or not doc:
        raise ParseError("expected a problem object or a list of payoff vectors", source, path="$")
    vecs = [_vector(v, f"$[{i}]", source) for i, v in enumerate(doc)]
    mode = infer_mode([list(v) for v in vecs])
    return MaxAffine.of([tuple(coerce(x, mode) for x in v) for v in vecs])


def distribution_from_json(doc: Any, source: str = "<input>") -> PosteriorDistribution:
    """``{"support": [{"belief": [...], "weight": w}, ...]}``."""
    sup = _field(doc, "support", "", source)
    if not isinstance(sup, list) or not sup:
        raise ParseError("'support' must be a nonempty list", source, path="$.support")
    pts, ws = [], []
    for k, entry in enumerate(sup):
        where = f"$.support[{k}]"
        pts.append(_vector(_field(entry, "belief", where, source), where + ".belief", source))
        ws.append(_scalar(_field(entry, "weight", where, source), where + ".weight", source))
    mode = infer_mode([list(p) for p in pts], ws)
    try:
        return PosteriorDistribution.of([tuple(coerce(x, mode) for x in p) for p in pts],
                                        [coerce(w, mode) for w in ws])
    except MalformedInputError as exc:
        raise ParseError(str(exc), source, path="$.support") from None


def distribution_to_json(p: PosteriorDistribution) -> dict:
    return {"support": [{"belief": list(mu), "weight": w} for mu, w in p.support]}


def cost_from_json(doc: Any, source: str = "<input>") -> UPSCost:
    family = _field(doc, "family", "", source)
    if family == "entropy":
        return ScaledEntropy(float(_scalar(doc.get("scale", 1), "$.scale", source)))
    if family == "quadratic":
        m = doc.get("matrix")
        if m is None:
            return Quadratic()
        if not isinstance(m, list):
            raise ParseError("'matrix' must be a list of rows", source, path="$.matrix")
        rows = [_vector(r, f"$.matrix[{i}]", source) for i, r in enumerate(m)]
        return Quadratic(tuple(rows))
    if family == "max-paraboloid":
        eps = _scalar(_field(doc, "eps", "", source), "$.eps", source)
        raw = _field(doc, "pieces", "", source)
        if not isinstance(raw, list) or not raw:
            raise ParseError("'pieces' must be a nonempty list", source, path="$.pieces")
        pieces = []
        for k, pc in enumerate(raw):
            where = f"$.pieces[{k}]"
            pieces.append((_vector(_field(pc, "slope", where, source), where + ".slope", source),
                           _vector(_field(pc, "center", where, source), where + ".center", source)))
        mode = infer_mode([eps], [list(a) + list(c) for a, c in pieces])
        return MaxParaboloid(tuple((tuple(coerce(x, mode) for x in a), tuple(coerce(x, mode) for x in c))
                                   for a, c in pieces), coerce(eps, mode))
    if family == "affine-shift":
        eps = _scalar(_field(doc, "eps", "", source), "$.eps", source)
        base = value_fn_from_json(_field(doc, "base", "", source), source)
        reg = cost_from_json(_field(doc, "regularizer", "", source), source)
        return AffineShiftOfValue(base, eps, reg)
    raise ParseError(f"unknown cost family {family!r}", source, path="$.family")


def cost_to_json(cost: UPSCost) -> dict:
    return {"family": cost.family, **cost.params()}


def prior_from_text(text: str) -> tuple:
    """``"3/10,7/10"`` or ``"0.3,0.7"``; decimal strings are read exactly.
    A single entry is allowed (callers read it as P(second state))."""
    try:
        vals = [parse_scalar(t) for t in text.split(",") if t.strip()]
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse prior {text!r}", "--prior") from None
    if not vals:
        raise ParseError("empty prior", "--prior")
    return tuple(vals)


# -- writing ----------------------------------------------------------------------------

def to_jsonable(obj: Any) -> Any:
    """Plain JSON values with canonical scalar formatting."""
    if isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, float, Fraction)):
        return format_scalar(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, DecisionProblem):
        return to_jsonable(problem_to_json(obj))
    if isinstance(obj, PosteriorDistribution):
        return to_jsonable(distribution_to_json(obj))
    if isinstance(obj, UPSCost):
        return to_jsonable(cost_to_json(obj))
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def atomic_write(path: str | os.PathLike, data: str | bytes) -> Path:
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: str | os.PathLike, obj: Any) -> Path:
    return atomic_write(path, dumps(obj))


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_scalar(x.item() if isinstance(x, np.generic) else x) for x in r])
    return buf.getvalue()


def write_csv(path: str | os.PathLike, header: Sequence[str], rows) -> Path:
    return atomic_write(path, csv_text(header, rows))
