"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 inapplicable construction,
4 internal numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .acquisition import (is_nonredundant, solve_acquisition,
                          synthesize_cost)
from .applications import ScreeningInstance, screening_solve
from .comparative import classify_transformation
from .decision import DecisionProblem, subdivision, undominated_actions, value_at
from .errors import (InapplicableError, InfoValueError, MalformedInputError, NumericDomainError,
                     PreconditionError, SynthesisError)
from .geometry import volume
from .numeric import Mode, coerce, format_scalar
from .serialization import (ParseError, cost_from_json, distribution_from_json, load_file,
                            atomic_write, prior_from_text, problem_from_json, value_fn_from_json,
                            write_csv, write_json)
from .suites import DEFAULT_SEED, SUITES, run_suite

log = logging.getLogger("infovalue")

EXIT_OK, EXIT_INPUT, EXIT_INAPPLICABLE, EXIT_NUMERIC = 0, 2, 3, 4

QUICK = {
    "flexibility": {"count2": 100, "count3": 20},
    "total-refining": {"count": 30},
    "affine": {"count": 50},
    "removal": {"count": 50},
    "more-convex": {"count": 10},
    "two-states": {"count": 10},
    "synthesis": {"count": 10},
    "mpc-oracle": {"count": 40},
    "shift": {"count": 20},
}


@dataclass
class RunConfig:
    command: str
    inputs: list
    mode: Optional[str]
    grid: Optional[int]
    out: str
    seed: int
    prior: Optional[list] = None
    extra: dict = field(default_factory=dict)

    def record(self) -> dict:
        """What goes into reports; the output location is left out so that
        re-runs into another directory stay byte-identical."""
        out = asdict(self)
        out.pop("out")
        return out


def _config(args, inputs: Sequence[str]) -> RunConfig:
    return RunConfig(args.command, [str(p) for p in inputs], args.mode, args.grid, str(args.out),
                     args.seed, list(args.prior) if args.prior else None)


def _prior_for(args, n: int):
    if not args.prior:
        return None
    p = tuple(args.prior)
    if len(p) == 1 and n == 2:
        p = (1 - p[0], p[0])
    if len(p) != n:
        raise MalformedInputError(f"prior has {len(p)} entries for {n} states")
    return p


def _load_problem(path: str, mode: Optional[str]) -> DecisionProblem:
    d = problem_from_json(load_file(path), path)
    return d.with_mode(mode) if mode else d


def _out(args, name: str) -> Path:
    return Path(args.out) / name


def _mu2(points) -> list:
    return [p[1] for p in points]


# -- commands ------------------------------------------------------------------------

def cmd_analyze(args) -> dict:
    d = _load_problem(args.problem, args.mode)
    stem = Path(args.problem).stem
    sub = subdivision(d)
    cells = []
    for c in sub.cells:
        entry = {"labels": list(c.labels), "payoff": list(c.payoff), "vertices": [list(v) for v in c.vertices]}
        if d.n <= 3:
            entry["volume"] = volume(c.polytope)
        cells.append(entry)
    report = {"config": _config(args, [args.problem]).record(), "problem": d,
              "undominated": sorted(undominated_actions(d)), "cells": cells,
              "cell_count": len(cells), "files": {}}
    prior = _prior_for(args, d.n)
    if prior is not None:
        val, acts = value_at(d, prior)
        report["prior"] = {"belief": list(prior), "value": val, "optimal": sorted(acts)}
    files = report["files"]
    if d.n in (2, 3):
        from .plotting import plot_subdivision, plot_value_function
        plot_subdivision(sub, _out(args, f"{stem}.subdivision.svg"))
        files["subdivision_svg"] = f"{stem}.subdivision.svg"
        if d.n == 2:
            plot_value_function(d.value_fn(), _out(args, f"{stem}.value.svg"))
            files["value_svg"] = f"{stem}.value.svg"
    else:
        report["notice"] = "figures are drawn for two or three states only"
    if d.n == 2:
        R = args.grid or 400
        f = d.with_mode(Mode.FLOAT).value_fn()
        rows = []
        for k in range(R + 1):
            mu = (1 - k / R, k / R)
            rows.append((mu[1], f.evaluate(mu), "+".join(f.argmax(mu))))
        write_csv(_out(args, f"{stem}.value.csv"), ["mu", "value", "optimal"], rows)
        files["value_csv"] = f"{stem}.value.csv"
    write_json(_out(args, f"{stem}.subdivision.json"), report)
    print(f"{stem}: {len(cells)} cell(s); undominated {', '.join(report['undominated'])}")
    return report


def cmd_compare(args) -> dict:
    d = _load_problem(args.problem, args.mode)
    dh = _load_problem(args.transformed, args.mode)
    if d.states != dh.states:
        raise MalformedInputError("the two problems have different state lists")
    priors = []
    for text in args.at or ():
        p = prior_from_text(text)
        priors.append((1 - p[0], p[0]) if len(p) == 1 and d.n == 2 else p)
    if args.prior:
        priors.append(_prior_for(args, d.n))
    verdict = classify_transformation(d, dh, priors)
    lines = [f"transformation: {verdict.kind}",
             f"greater value: {'yes' if verdict.greater_value_free_prior else 'no'}",
             f"refines: {'yes' if verdict.refines else 'no'}"]
    if verdict.nonconvexity_witness is not None:
        w = verdict.nonconvexity_witness
        lines.append(f"witness: mu={[format_scalar(x) for x in w.mu]} "
                     f"mu'={[format_scalar(x) for x in w.mu_prime]} gap={format_scalar(w.gap)}")
    for p in verdict.priors:
        lines.append(f"prior {[format_scalar(x) for x in p.prior]}: shift-majorizes "
                     f"{'yes' if p.shift_majorizes else 'no'}")
    summary = "\n".join(lines) + "\n"
    stem = f"{Path(args.problem).stem}__{Path(args.transformed).stem}"
    report = {"config": _config(args, [args.problem, args.transformed]).record(),
              "verdict": verdict, "summary": lines}
    write_json(_out(args, f"{stem}.verdict.json"), report)
    atomic_write(_out(args, f"{stem}.verdict.txt"), summary)
    sys.stdout.write(summary)
    return report


def cmd_acquire(args) -> dict:
    d = _load_problem(args.problem, None)
    cost = cost_from_json(load_file(args.cost), args.cost)
    prior = _prior_for(args, d.n)
    if prior is None:
        raise MalformedInputError("acquire needs --prior")
    sol = solve_acquisition(d.value_fn(), cost, prior, args.grid, mode=args.mode)
    stem = Path(args.problem).stem
    report = {"config": _config(args, [args.problem, args.cost]).record(),
              "cost": cost, "distribution": sol.distribution,
              "support_mu2": _mu2(sol.distribution.points) if d.n == 2 else None,
              "weight_sum": sum(sol.distribution.weights),
              "mean_error": max(abs(a - b) for a, b in zip(sol.distribution.mean, sol.prior)),
              "net_value": sol.net_value, "lp_value": sol.lp_value, "dual_gap": sol.dual_gap,
              "unique": sol.unique, "grid_resolution": sol.resolution, "grid_size": sol.grid_size,
              "mode": sol.mode, "files": {}}
    if d.n == 2:
        R = sol.resolution
        v = d.with_mode(Mode.FLOAT).value_fn()
        rows = []
        for k in range(R + 1):
            mu = (1 - k / R, k / R)
            rows.append((mu[1], v.evaluate(mu), float(cost.potential(mu)),
                         v.evaluate(mu) - float(cost.potential(mu))))
        write_csv(_out(args, f"{stem}.acquire.csv"), ["mu", "value", "cost", "net"], rows)
        report["files"]["curve_csv"] = f"{stem}.acquire.csv"
        from .plotting import plot_value_function
        plot_value_function(v, _out(args, f"{stem}.acquire.svg"),
                            curves=[("V - c", lambda mu: v.evaluate(mu) - float(cost.potential(mu)))],
                            support=sol.distribution.points)
        report["files"]["curve_svg"] = f"{stem}.acquire.svg"
    write_json(_out(args, f"{stem}.acquire.json"), report)
    pts = ", ".join(f"{[format_scalar(x) for x in p]} w={format_scalar(w)}"
                    for p, w in sol.distribution.support)
    print(f"support: {pts}")
    return report


def _screening_from_json(doc, source: str) -> ScreeningInstance:
    for key in ("v1", "v2", "rho", "prior", "cost"):
        if not isinstance(doc, dict) or key not in doc:
            raise ParseError(f"missing field {key!r}", source, path="$")
    v1 = value_fn_from_json(doc["v1"], source)
    v2 = value_fn_from_json(doc["v2"], source)
    try:
        rho = coerce(doc["rho"], Mode.EXACT) if not isinstance(doc["rho"], float) else doc["rho"]
        prior = tuple(coerce(x, Mode.EXACT) if not isinstance(x, float) else x for x in doc["prior"])
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError("bad 'rho' or 'prior'", source, path="$") from None
    return ScreeningInstance(v1, v2, rho, prior, cost_from_json(doc["cost"], source))


def cmd_screen(args) -> dict:
    inst = _screening_from_json(load_file(args.instance), args.instance)
    sol = screening_solve(inst, args.grid, mode=args.mode)
    contract = lambda c: {"distribution": c.distribution, "price": c.price}
    report = {"config": _config(args, [args.instance]).record(),
              "first_best": [contract(c) for c in sol.first_best],
              "second_best": [contract(c) for c in sol.second_best],
              "diagnostics": sol.diagnostics}
    write_json(_out(args, f"{Path(args.instance).stem}.screen.json"), report)
    print(f"first-best prices t1={format_scalar(sol.first_best[0].price)} "
          f"t2={format_scalar(sol.first_best[1].price)}")
    return report


def cmd_synth_cost(args) -> dict:
    d = _load_problem(args.problem, args.mode)
    phi = distribution_from_json(load_file(args.target), args.target)
    prior = _prior_for(args, d.n) or phi.mean
    rep = synthesize_cost(d, phi, prior, report=True)
    report = {"config": _config(args, [args.problem, args.target]).record(),
              "cost": rep.cost, "eps": rep.eps, "start": rep.start, "halvings": rep.halvings,
              "margin": rep.margin, "nonredundant": is_nonredundant(d.value_fn(), phi)}
    if args.grid:
        sol = solve_acquisition(d.value_fn(), rep.cost, prior, args.grid, extra_points=phi.points)
        report["check"] = {"distribution": sol.distribution, "unique": sol.unique}
    write_json(_out(args, f"{Path(args.problem).stem}.cost.json"), report)
    write_json(_out(args, f"{Path(args.problem).stem}.cost.spec.json"), rep.cost)
    print(f"eps={format_scalar(rep.eps)} after {rep.halvings} halving(s)")
    return report


def cmd_verify(args) -> dict:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise MalformedInputError(f"unknown suite {unknown[0]!r}; choose from {sorted(SUITES)} or 'all'")
    out = {}
    failed = False
    for name in names:
        kw = QUICK.get(name, {}) if args.quick else {}
        rep = run_suite(name, seed=args.seed, **kw)
        rep["config"] = _config(args, []).record()
        rep["config"]["extra"] = {"suite": name, "quick": bool(args.quick)}
        write_json(_out(args, f"verify-{name}.json"), rep)
        print(f"{name}: {'pass' if rep['passed'] else 'FAIL'} "
              f"({rep['checked']} checked, {rep['violation_count']} violation(s))")
        failed |= not rep["passed"]
        out[name] = rep
    if failed:
        raise _SuiteFailure()
    return out


class _SuiteFailure(Exception):
    pass


# -- argument parsing ---------------------------------------------------------------------

def _mode_arg(text: str) -> str:
    if text not in ("exact", "float"):
        raise argparse.ArgumentTypeError("mode must be 'exact' or 'float'")
    return text


def _grid_arg(text: str) -> int:
    try:
        R = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be an integer") from None
    if R < 2:
        raise argparse.ArgumentTypeError("grid must be at least 2")
    return R


def _prior_arg(text: str) -> tuple:
    try:
        return prior_from_text(text)
    except MalformedInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", type=_mode_arg, default=None, help="arithmetic: exact or float")
    common.add_argument("--grid", type=_grid_arg, default=None, help="belief grid resolution R")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized suites")
    common.add_argument("--prior", type=_prior_arg, default=None,
                        help="prior p1,p2,... (a single number means P(second state) for two states)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="infovalue", description="Value-of-information analysis "
                                 "for finite decision problems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="value function and subdivision")
    p.add_argument("problem")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", parents=[common], help="classify a transformation")
    p.add_argument("problem")
    p.add_argument("transformed")
    p.add_argument("--at", action="append", help="extra prior to test (repeatable)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("acquire", parents=[common], help="optimal information acquisition")
    p.add_argument("problem")
    p.add_argument("--cost", required=True, help="cost specification file")
    p.set_defaults(func=cmd_acquire)

    p = sub.add_parser("screen", parents=[common], help="sell information to two types")
    p.add_argument("instance")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("synth-cost", parents=[common], help="cost generating a target distribution")
    p.add_argument("problem")
    p.add_argument("target")
    p.set_defaults(func=cmd_synth_cost)

    p = sub.add_parser("verify", parents=[common], help="run seeded verification suites")
    p.add_argument("suite", help=f"one of {', '.join(sorted(SUITES))} or 'all'")
    p.add_argument("--quick", action="store_true", help="reduced instance counts")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except _SuiteFailure:
        return EXIT_NUMERIC
    except (MalformedInputError, NumericDomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InapplicableError, SynthesisError) as exc:
        print(f"inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InfoValueError, ArithmeticError, ValueError, RuntimeError) as exc:
        log.debug("numeric failure", exc_info=True)
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
