"""Command-line interface: ``defbakit {defba,sdefba,horizon,toy}``.

Exit status is 0 on success, 1 when a problem is infeasible or unbounded
and 2 on usage or model-document errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from .defba import solve_defba
from .errors import (BracketFailure, Infeasible, NonpositiveBound, SchemaError, Unbounded,
                     ValidationError)
from .horizon import compute_horizon, integral_balanced, integral_linear
from .io import iteration_log_lines, load_model, serialize_model, toy_model, write_trajectory
from .sdefba import INFEASIBLE, SdefbaConfig, run_sdefba

EXIT_OK, EXIT_PROBLEM, EXIT_USAGE = 0, 1, 2

TOY_DEFAULTS = {"t_end": 3.0, "dt": 0.1, "safety_factor": 0.9}


class _UsageError(Exception):
    pass


def _fmt(x) -> str:
    return "none" if x is None else format(float(x), ".17g")


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _setting(args, name, defaults, key):
    value = getattr(args, name)
    if value is None:
        value = defaults.get(key)
    if value is None:
        raise _UsageError(f"--{name.replace('_', '-')} is required (no default in the model document)")
    return float(value)


def _thresholds(items):
    if not items:
        return None
    out = {}
    for item in items:
        sid, sep, value = item.partition("=")
        if not sep:
            raise _UsageError(f"--threshold expects SPECIES=AMOUNT, got {item!r}")
        try:
            out[sid] = float(value)
        except ValueError:
            raise _UsageError(f"--threshold amount is not a number: {value!r}") from None
    return out


def _cmd_defba(args) -> int:
    model, state, defaults = load_model(args.model)
    t_end = _setting(args, "t_end", defaults, "t_end")
    dt = _setting(args, "dt", defaults, "dt")
    traj = solve_defba(model, state, t_end, dt)
    _write(args.out, write_trajectory(traj, args.format))
    return EXIT_OK


def _cmd_sdefba(args) -> int:
    model, state, defaults = load_model(args.model)
    t_end = _setting(args, "t_end", defaults, "t_end")
    dt = _setting(args, "dt", defaults, "dt")
    safety = args.safety if args.safety is not None else defaults.get("safety_factor", 0.9)
    fixed = args.tp is not None or args.tc is not None
    if fixed and args.auto:
        raise _UsageError("--auto cannot be combined with --tp/--tc")
    if fixed and (args.tp is None or args.tc is None):
        raise _UsageError("fixed horizons need both --tp and --tc")
    try:
        if fixed:
            cfg = SdefbaConfig.fixed(t_end, dt, args.tp, args.tc, safety_factor=safety,
                                     depletion_thresholds=_thresholds(args.threshold))
        else:
            cfg = SdefbaConfig(t_end=t_end, d=dt, safety_factor=safety,
                               depletion_thresholds=_thresholds(args.threshold),
                               fallback_tp=args.fallback_tp)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        run = run_sdefba(model, state, cfg)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    _write(args.out, write_trajectory(run.trajectory, args.format))
    if args.log:
        _write(args.log, iteration_log_lines(run.log_records()))
    if run.stop_reason == INFEASIBLE:
        print(f"error: {run.message}", file=sys.stderr)
        return EXIT_PROBLEM
    if run.stop_reason != "reached_t_end":
        print(f"stopped: {run.stop_reason} at t = {_fmt(run.trajectory.times[-1])} h", file=sys.stderr)
    return EXIT_OK


def _cmd_horizon(args) -> int:
    model, state, defaults = load_model(args.model)
    safety = defaults.get("safety_factor", 0.9)
    diag = compute_horizon(model, state, safety_factor=safety, B_init=args.b_init)
    for key in ("lambda_s", "lambda_r", "mu_bal", "t_p", "t_c"):
        print(f"{key} = {_fmt(getattr(diag, key))}")
    if args.curves:
        _write(args.curves, _curves_csv(diag))
    return EXIT_OK


def _curves_csv(diag, n=201) -> str:
    """Both integral curves on ``[0, 2 t_p]`` (``[0, 10 h]`` without a horizon)."""
    t_max = 2.0 * diag.t_p if diag.t_p else 10.0
    t = np.linspace(0.0, t_max, n)
    ib_lin = integral_linear(t, diag.lambda_r, diag.B_init)
    ib_bal = integral_balanced(t, diag.mu_bal, diag.B_init)
    rows = ["t,IB_lin,IB_bal"] + [f"{_fmt(a)},{_fmt(b)},{_fmt(c)}" for a, b, c in zip(t, ib_lin, ib_bal)]
    return "\n".join(rows) + "\n"


def _cmd_toy(args) -> int:
    model, state = toy_model()
    _write(args.emit, serialize_model(model, state, TOY_DEFAULTS))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="defbakit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("defba", help="solve the full-horizon problem")
    p.add_argument("model")
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--out", required=True, help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_defba)

    p = sub.add_parser("sdefba", help="run the receding-horizon loop")
    p.add_argument("model")
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--auto", action="store_true", help="derive t_p and t_c each iteration (default)")
    p.add_argument("--tp", type=float, help="fixed prediction horizon (h)")
    p.add_argument("--tc", type=float, help="fixed iteration time (h)")
    p.add_argument("--safety", type=float, help="safety factor in (0, 1)")
    p.add_argument("--fallback-tp", type=float, help="horizon used when linear growth never wins")
    p.add_argument("--threshold", action="append", metavar="SPECIES=AMOUNT",
                   help="depletion threshold of an external species (repeatable)")
    p.add_argument("--log", help="JSON-lines iteration log file")
    p.add_argument("--out", required=True, help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_sdefba)

    p = sub.add_parser("horizon", help="print static rates, t_p and t_c")
    p.add_argument("model")
    p.add_argument("--b-init", type=float)
    p.add_argument("--curves", metavar="FILE", help="write both integral curves as CSV")
    p.set_defaults(func=_cmd_horizon)

    p = sub.add_parser("toy", help="write the built-in toy model document")
    p.add_argument("--emit", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_toy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (_UsageError, SchemaError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Infeasible, Unbounded, NonpositiveBound, BracketFailure) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROBLEM


if __name__ == "__main__":
    sys.exit(main())
