"""Command line: ``mmlrsketch {verify,solve,paper-example}``.

Exit codes: 0 when every applicable check holds, 1 on a verification
failure, 2 on configuration, file or dimension errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, sketch, worked_example
from .dense import SchattenOrder, schatten_norm
from .errors import MmlrError
from .matrixio import read_matrix, write_matrix
from .mmlr import MmlrProblem, solution_error, solve_exact, solve_sketched
from .verify import SKETCH_CHOICES, ExperimentConfig, cmd_verify, dumps, summary_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _p_list(text):
    try:
        return [SchattenOrder.coerce(tok) for tok in text.split(",") if tok.strip()]
    except MmlrError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(sub):
    sub.add_argument("--p", type=_p_list, default=_p_list("1,2,inf"),
                     help="comma-separated Schatten orders, e.g. 1,1.5,2,inf")
    sub.add_argument("--rank-tol", type=float, default=None)
    sub.add_argument("--out", type=Path, default=None)
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(prog="mmlrsketch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mmlrsketch {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    v = subs.add_parser("verify", help="seeded batch verification of all bounds and identities")
    v.add_argument("--m", type=int, default=200)
    v.add_argument("--n", type=int, default=10)
    v.add_argument("--d", type=int, default=5)
    v.add_argument("--c", type=int, default=60)
    v.add_argument("--sketch", choices=sorted(SKETCH_CHOICES), default="gaussian")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=1)
    v.add_argument("--angle-tol", type=float, default=ExperimentConfig.angle_tol)
    v.add_argument("--slack-tol", type=float, default=ExperimentConfig.slack_tol)
    v.add_argument("--identity-tol", type=float, default=ExperimentConfig.identity_tol)
    v.add_argument("--noise", type=float, default=1.0)
    v.add_argument("--a", type=Path, default=None, help="design matrix file (with --b)")
    v.add_argument("--b", type=Path, default=None, help="right-hand side file (with --a)")
    v.add_argument("--s", type=Path, default=None, help="sketch matrix file (--sketch file)")
    _common(v)

    s = subs.add_parser("solve", help="solve the exact and optionally the sketched problem")
    s.add_argument("a", type=Path)
    s.add_argument("b", type=Path)
    s.add_argument("--sketch", choices=sorted(SKETCH_CHOICES), default=None)
    s.add_argument("--c", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--s", type=Path, default=None)
    _common(s)

    e = subs.add_parser("paper-example", help="recompute the 6 x 3 worked example")
    e.add_argument("--out", type=Path, default=None)
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _run_verify(args):
    cfg = ExperimentConfig(
        m=args.m, n=args.n, d=args.d, c=args.c, sketch_kind=args.sketch, seed=args.seed,
        trials=args.trials, p_list=args.p, rank_tol=args.rank_tol, angle_tol=args.angle_tol,
        slack_tol=args.slack_tol, identity_tol=args.identity_tol, noise=args.noise,
        a_path=None if args.a is None else str(args.a),
        b_path=None if args.b is None else str(args.b),
        s_path=None if args.s is None else str(args.s),
    )
    report = cmd_verify(cfg)
    _emit(summary_csv(report) if args.format == "csv" else dumps(report), args.out)
    return EXIT_OK if report["summary"]["all_hold"] else EXIT_FAIL


def _run_solve(args):
    problem = MmlrProblem(read_matrix(args.a), read_matrix(args.b), args.rank_tol)
    exact = solve_exact(problem)
    report = {
        "artifact": {"name": "mmlrsketch", "version": __version__},
        "command": "solve",
        "shape": {"m": problem.m, "n": problem.n, "d": problem.d},
        "norms": {},
        "files": {},
    }
    sk = None
    if args.sketch is not None:
        if args.sketch == "file":
            if args.s is None:
                raise MmlrError("--sketch file needs --s")
            s_op = sketch.from_matrix(read_matrix(args.s), problem.n)
        else:
            c = args.c if args.c is not None else problem.n
            s_op = sketch.make(SKETCH_CHOICES[args.sketch], problem.m, c, problem.n, args.seed)
        sk = solve_sketched(problem, s_op)
        report["sketch"] = {**s_op.describe(), "rank_preserved": bool(sk.rank_preserved)}

    for p in args.p:
        row = {"residual_exact": schatten_norm(exact.r_hat, p)}
        if sk is not None:
            row["residual_sketched"] = schatten_norm(sk.r_tilde, p)
            row["solution_error"] = solution_error(exact, sk, p)
        report["norms"][str(p)] = row

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_matrix(args.out / "x_hat.mtx", exact.x_hat, comment="exact solution")
        report["files"]["x_hat"] = str(args.out / "x_hat.mtx")
        if sk is not None:
            write_matrix(args.out / "x_tilde.mtx", sk.x_tilde, comment="sketched solution")
            report["files"]["x_tilde"] = str(args.out / "x_tilde.mtx")
        (args.out / "report.json").write_text(dumps(report), encoding="utf-8")

    if args.format == "csv":
        lines = ["p,residual_exact,residual_sketched,solution_error"]
        for p, row in report["norms"].items():
            lines.append(",".join([p] + [format(row[k], ".17g") if k in row else ""
                                         for k in ("residual_exact", "residual_sketched",
                                                   "solution_error")]))
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(dumps(report))
    return EXIT_OK


def _run_worked_example(args):
    report = worked_example.run()
    _emit(dumps(report), args.out)
    for rec in report["checks"]:
        mark = "PASS" if rec["passed"] else "FAIL"
        print(f"[{mark}] {rec['name']}", file=sys.stderr)
    return EXIT_OK if report["summary"]["all_passed"] else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "solve":
            return _run_solve(args)
        return _run_worked_example(args)
    except (MmlrError, OSError) as exc:
        print(f"mmlrsketch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
