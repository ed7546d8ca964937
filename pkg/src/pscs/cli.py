"""Command line entry point: ``pscs {ric,check,solve,experiment}``."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import conditions as cond
from .core import WeightedNormParams, decompose_support
from .errors import CapExceeded, MalformedFile, PSCSError
from .fileio import parse_index_list, read_matrix, read_vector
from .harness import ExperimentConfig, RicCache, evaluate_conditions, run_experiment, write_csv
from .ric import DEFAULT_CAP, delta_exact, delta_sampled, theta_exact, theta_sampled
from .solvers import solve_weighted_l0, solve_weighted_l1

EXIT_USAGE = 2
EXIT_VIOLATION = 3

CHECK_CHOICES = cond.CONDITION_NAMES + ("all",)


def _pair(text):
    try:
        s, st = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 's,stilde', got {text!r}") from None
    return s, st


def _index_list(text):
    try:
        return parse_index_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_ric(args):
    A = read_matrix(args.matrix)
    if args.delta is not None:
        if args.sample:
            rep = delta_sampled(A, args.delta, args.sample, args.seed)
        else:
            rep = delta_exact(A, args.delta, cap=args.cap, workers=args.workers)
    else:
        s, st = args.theta
        if args.sample:
            rep = theta_sampled(A, s, st, args.sample, args.seed)
        else:
            rep = theta_exact(A, s, st, cap=args.cap, workers=args.workers)
    print(rep.line())
    return 0


def cmd_check(args):
    A = read_matrix(args.matrix)
    decomp = decompose_support(args.N, args.T, A.n)
    which = None if args.which == "all" else [args.which]
    verdicts = evaluate_conditions(decomp, args.w, RicCache(A, cap=args.cap), which)
    print("name,lhs,threshold,holds,degenerate,order_used")
    for v in verdicts:
        order = "" if v.order is None else str(v.order)
        print(
            f"{v.name},{v.lhs!r},{v.threshold!r},{str(v.holds).lower()},"
            f"{str(v.degenerate).lower()},{order}"
        )
    return 0


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def cmd_solve(args):
    A = read_matrix(args.matrix)
    y = read_vector(args.y)
    params = WeightedNormParams(args.T, args.w, A.n)
    if args.p == 0:
        res = solve_weighted_l0(A, y, params)
        certificate = None
    else:
        res = solve_weighted_l1(A, y, params)
        certificate = {
            "max_off_support": res.diagnostics.get("max_off_support"),
            "strict": res.diagnostics.get("strict", False),
        }
    minimizers = res.minimizers if args.all_minimizers else res.minimizers[:1]
    out = {
        "objective": res.objective,
        "minimizers": [_jsonable(x) for x in minimizers],
        "unique": res.unique.value,
        "residual": res.residual,
        "certificate": certificate,
    }
    print(json.dumps(out))
    return 0


def cmd_experiment(args):
    cfg = ExperimentConfig.from_file(args.config)
    result = run_experiment(cfg, workers=args.workers)
    write_csv(result.records, args.out)
    s = result.summary
    print(
        f"records={s['records']} skipped={s['skipped']} violations={s['violations']}",
        file=sys.stderr,
    )
    for trial, order in result.skipped:
        print(f"trial {trial} skipped: order {order} exceeds cap", file=sys.stderr)
    return EXIT_VIOLATION if s["violations"] else 0


def build_parser():
    p = argparse.ArgumentParser(prog="pscs", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("ric", help="restricted isometry / orthogonality constants")
    r.add_argument("--matrix", required=True)
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--delta", type=int, metavar="K")
    g.add_argument("--theta", type=_pair, metavar="S,STILDE")
    r.add_argument("--sample", type=int, default=0, metavar="N", help="random trials instead of exact")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--cap", type=int, default=DEFAULT_CAP)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_ric)

    c = sub.add_parser("check", help="evaluate uniqueness conditions")
    c.add_argument("--matrix", required=True)
    c.add_argument("--N", type=_index_list, required=True)
    c.add_argument("--T", type=_index_list, required=True)
    c.add_argument("--w", type=float, required=True)
    c.add_argument("--which", choices=CHECK_CHOICES, default="all")
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="solve the weighted 0- or 1-norm problem")
    s.add_argument("--matrix", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--T", type=_index_list, required=True)
    s.add_argument("--w", type=float, required=True)
    s.add_argument("--p", type=int, choices=(0, 1), required=True)
    s.add_argument("--all-minimizers", action="store_true")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", help="seeded theorem-validation run")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"pscs: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedFile, PSCSError, ValueError, OSError) as exc:
        print(f"pscs: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
