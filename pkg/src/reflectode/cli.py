"""Command-line front end.

Subcommands::

    classify   regime, omega, degenerate initial points and thresholds (JSON)
    green      G(t, s) on a uniform lattice (CSV "t,s,G")
    solve      solution values (CSV "t,u"), optional JSON sidecar
    region     sign report with the maximal constant-sign strip (JSON)
    validate   solver against the shooting oracle (JSON)
    nsolve     n-th order construction with a built-in auxiliary pair (CSV "t,u")

Problems come from flags or from a JSON file ``{"a", "b", "t0", "c", "h",
"window"}`` given with ``--file`` (``-`` reads stdin); flags override file
fields.  Exit status is 0 on success, 2 when the initial value problem is
not uniquely solvable and 1 for every other error, reported as one JSON
line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .analysis import degenerate_t0, sign_report
from .core import C3_MINUS, C3_PLUS, Coefficients, classify
from .errors import NonuniqueProblemError, ReflectodeError
from .expr import parse_forcing
from .kernel import GreenKernel, green_grid, lattice
from .nthorder import AuxPair, NthProblem, construct
from .oracle import compare, shooting_solve
from .quadrature import DEFAULT_TOL
from .solver import ProblemSpec, closed_form_c31, closed_form_c32, solve

TOL_ENV = "REFLECTODE_TOL"
EXIT_OK, EXIT_ERROR, EXIT_NONUNIQUE = 0, 1, 2
VALIDATE_RESIDUAL_LIMIT = 1e-4


class UsageError(ReflectodeError):
    """Bad command-line usage."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for non-unique problems here
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    """Shortest string that round-trips to the same double."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, np.integer):
        return int(value)
    return value


def dumps(payload) -> str:
    return json.dumps(_jsonable(payload), allow_nan=False)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not (value > 0 and math.isfinite(value)):
        raise UsageError(f"{TOL_ENV} must be positive and finite, got {raw!r}")
    return value


def _load_file(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        data = json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read problem file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"problem file is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(data, dict):
        raise UsageError("problem file must hold a JSON object")
    unknown = set(data) - {"a", "b", "t0", "c", "h", "window"}
    if unknown:
        raise UsageError(f"unknown problem file field(s): {', '.join(sorted(unknown))}")
    return data


def _settings(args) -> dict:
    """Problem fields from the file, overridden by flags."""
    merged = _load_file(args.file) if getattr(args, "file", None) else {}
    for name in ("a", "b", "t0", "c", "h", "window"):
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    return merged


def _number(settings: dict, name: str, default=None) -> float:
    value = settings.get(name, default)
    if value is None:
        raise UsageError(f"missing required value {name!r} (flag --{name} or problem file)")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(out):
        raise UsageError(f"{name} must be finite")
    return out


def _window(settings: dict, default=(-3.0, 3.0)) -> tuple:
    value = settings.get("window", default)
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise UsageError("window must be a pair [lo, hi]")
    lo, hi = (_number({"window": v}, "window") for v in value)
    if lo > hi:
        raise UsageError("window must satisfy lo <= hi")
    return lo, hi


def _coefficients(settings: dict) -> Coefficients:
    return Coefficients(_number(settings, "a"), _number(settings, "b"))


def _problem(settings: dict) -> ProblemSpec:
    h = settings.get("h")
    if h is None:
        raise UsageError("missing forcing expression (flag --h or problem file field 'h')")
    if not isinstance(h, str):
        raise UsageError("forcing h must be an expression string")
    forcing = parse_forcing(h).to_forcing()
    return ProblemSpec(_coefficients(settings), _number(settings, "t0", 0.0), _number(settings, "c", 0.0), forcing)


def _eval_points(args, settings: dict) -> np.ndarray:
    if args.eval is not None:
        return np.array([_number({"eval": v}, "eval") for v in args.eval])
    if args.grid is not None:
        lo, hi, n = args.grid
        count = int(_number({"n": n}, "n"))
        if count < 1 or count != float(n):
            raise UsageError("grid point count must be a positive integer")
        return np.linspace(_number({"lo": lo}, "lo"), _number({"hi": hi}, "hi"), count)
    lo, hi = _window(settings)
    return np.linspace(lo, hi, 11)


# ---------------------------------------------------------------- subcommands


def cmd_classify(args, tol) -> str:
    settings = _settings(args)
    coeffs = _coefficients(settings)
    case = classify(coeffs)
    report = sign_report(coeffs.a, coeffs.b)
    payload = {
        "case": case.tag,
        "omega": case.omega,
        "degenerate_t0": degenerate_t0(coeffs.a, coeffs.b).to_dict(),
        "thresholds": report.to_dict()["thresholds"],
    }
    return dumps(payload) + "\n"


def cmd_green(args, tol) -> str:
    settings = _settings(args)
    kernel = GreenKernel.from_coefficients(_coefficients(settings))
    window = _window(settings, (-1.0, 1.0))
    t_range = tuple(args.t_range) if args.t_range else window
    s_range = tuple(args.s_range) if args.s_range else window
    n = args.n
    grid = green_grid(kernel, t_range, s_range, n)
    ts = lattice(t_range[0], t_range[1], n)
    ss = lattice(s_range[0], s_range[1], n)
    rows = ((ts[i], ss[j], grid[i, j]) for i in range(n) for j in range(n))
    return _csv(("t", "s", "G"), rows)


def _solve_with(problem: ProblemSpec, method: str, tol: float):
    if method == "green":
        return solve(problem, tol)
    tag = classify(problem.coeffs).tag
    if tag == C3_PLUS:
        return closed_form_c31(problem, tol)
    if tag == C3_MINUS:
        return closed_form_c32(problem, tol)
    raise UsageError(f"closed-form method needs a = b or a = -b, got case {tag}")


def cmd_solve(args, tol) -> str:
    settings = _settings(args)
    problem = _problem(settings)
    solution = _solve_with(problem, args.method, tol)
    ts = _eval_points(args, settings)
    us = solution(ts)
    if args.sidecar:
        sidecar = {"lambda": solution.lam, "ubar_t0": solution.ubar_t0, "case": solution.case.tag,
                   "omega": solution.case.omega, "method": solution.method}
        with open(args.sidecar, "w", encoding="utf-8") as fh:
            fh.write(dumps(sidecar) + "\n")
    return _csv(("t", "u"), zip(ts, us))


def cmd_region(args, tol) -> str:
    settings = _settings(args)
    coeffs = _coefficients(settings)
    return dumps(sign_report(coeffs.a, coeffs.b).to_dict()) + "\n"


def cmd_validate(args, tol) -> str:
    settings = _settings(args)
    problem = _problem(settings)
    lo, hi = _window(settings)
    T = max(abs(lo), abs(hi))
    oracle = shooting_solve(problem, T, args.step)
    solution = solve(problem, tol)
    keep = (oracle.t >= lo) & (oracle.t <= hi)
    every = max(1, int(np.count_nonzero(keep) // args.points))
    sub = type(oracle)(oracle.t[keep], oracle.u[keep], oracle.info)
    result = compare(problem, sub, solution, every=every)
    payload = {
        "sup_error": result.sup_error,
        "residual_sup": result.residual_sup,
        "pass": bool(result.sup_error <= args.threshold and result.residual_sup <= VALIDATE_RESIDUAL_LIMIT),
        "threshold": args.threshold,
        "points": int(result.grid.size),
        "step": oracle.info["step"],
    }
    return dumps(payload) + "\n"


def cmd_nsolve(args, tol) -> str:
    settings = _settings(args)
    if args.order != 1:
        raise UsageError(f"no built-in auxiliary pair for order {args.order}; only order 1 is available")
    a, b = _number(settings, "a"), _number(settings, "b")
    base = _problem(settings)
    problem = NthProblem.first_order(a, b, base.h, base.t0, base.c)
    solution = construct(problem, AuxPair.first_order(a, b), args.hypothesis, tol)
    ts = _eval_points(args, settings)
    return _csv(("t", "u"), zip(ts, solution(ts)))


# ---------------------------------------------------------------- parser


def _add_coefficients(p):
    p.add_argument("--a", type=float, help="reflection coefficient")
    p.add_argument("--b", type=float, help="identity coefficient")
    p.add_argument("--file", help="JSON problem file; '-' reads stdin")


def _add_problem(p):
    _add_coefficients(p)
    p.add_argument("--t0", type=float, help="initial point (default 0)")
    p.add_argument("--c", type=float, help="initial value (default 0)")
    p.add_argument("--h", help='forcing expression in t, e.g. "cos(3*t)^2"')
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), help="default range for output grids")


def _add_points(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--eval", nargs="+", metavar="T", help="explicit evaluation points")
    group.add_argument("--grid", nargs=3, metavar=("LO", "HI", "N"), help="N evenly spaced points")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reflectode", description="Solve u'(t) + a u(-t) + b u(t) = h(t), u(t0) = c.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tol", type=float, help=f"quadrature tolerance (default ${TOL_ENV} or {DEFAULT_TOL})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="coefficient regime and degenerate initial points")
    _add_coefficients(p)
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("green", help="Green's function on a lattice (CSV)")
    _add_coefficients(p)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--t-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--s-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--n", type=int, default=21, help="lattice points per axis (default 21)")
    p.set_defaults(run=cmd_green)

    p = sub.add_parser("solve", help="solution values (CSV)")
    _add_problem(p)
    _add_points(p)
    p.add_argument("--method", choices=("green", "closed-form"), default="green")
    p.add_argument("--sidecar", help="write {lambda, ubar_t0, case} as JSON to this path")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("region", help="sign report and constant-sign strip (JSON)")
    _add_coefficients(p)
    p.set_defaults(run=cmd_region)

    p = sub.add_parser("validate", help="compare the solver with the shooting oracle (JSON)")
    _add_problem(p)
    p.add_argument("--step", type=float, default=1e-3, help="RK4 step (default 1e-3)")
    p.add_argument("--points", type=int, default=200, help="approximate number of comparison points")
    p.add_argument("--threshold", type=float, default=1e-5, help="sup-error pass threshold (default 1e-5)")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("nsolve", help="n-th order construction (CSV)")
    _add_problem(p)
    _add_points(p)
    p.add_argument("--order", type=int, default=1, help="equation order n (built-in pair exists for n = 1)")
    p.add_argument("--hypothesis", choices=("h1", "h2", "h3"), default="h1")
    p.set_defaults(run=cmd_nsolve)
    return parser


def _error_line(exc: BaseException) -> str:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    degenerate = getattr(exc, "degenerate", None)
    if degenerate is not None:
        payload["degenerate_t0"] = degenerate.to_dict()
    check = getattr(exc, "check", None)
    if check is not None:
        payload["check"] = check
    return dumps(payload)


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        tol = args.tol if args.tol is not None else _default_tol()
        if not (tol > 0 and math.isfinite(tol)):
            raise UsageError("--tol must be positive and finite")
        output = args.run(args, tol)
    except NonuniqueProblemError as exc:
        stderr.write(_error_line(exc) + "\n")
        return EXIT_NONUNIQUE
    except (ReflectodeError, ValueError, ArithmeticError) as exc:
        stderr.write(_error_line(exc) + "\n")
        return EXIT_ERROR
    stdout.write(output)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
