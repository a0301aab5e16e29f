"""Command-line front end.

Two subcommands::

    masolve solve --problem standard --method bellman --n 63 [--out r.json]
    masolve study --problem degenerate --methods bellman,m2 --sizes 31,63,127
                  [--csv out.csv] [--json out.json] [--fit]

Exit codes: 0 on success (including recorded non-convergence), 1 on
configuration errors, 2 on numerical failures (singular systems,
non-finite values and the like).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys

from .errors import NUMERICAL_ERRORS, MASolveError, UnknownProblemError
from .harness import METHODS, StudyConfig, fit_report, run_solve, run_study

logger = logging.getLogger(__name__)


def _parse_params(pairs: list[str] | None) -> dict[str, float]:
    params: dict[str, float] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"--param expects name=value, got {pair!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise ValueError(f"--param {key} expects a real value, got {value!r}") from None
    return params


def _parse_sizes(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ValueError(f"--sizes expects comma-separated integers, got {text!r}") from None


def _add_common_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--param", action="append", metavar="NAME=VALUE",
                   help="problem parameter override (repeatable)")
    p.add_argument("--tol", type=float, default=None, help="termination tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="iteration cap")
    p.add_argument("--det-floor", type=float, default=None,
                   help="determinant floor of the positive definiteness test")
    p.add_argument("--no-interpolation", action="store_true",
                   help="disable the marked-point repair step")
    p.add_argument("--m1-root", choices=("smaller", "as-printed"), default="smaller",
                   help="root of the nodal quadratic used by m1")
    p.add_argument("--no-m2-clamp", action="store_true",
                   help="raise on negative radicands in m2 instead of clamping")
    p.add_argument("--threads", type=int, default=1,
                   help="BLAS thread cap during solves (default 1 for timing reproducibility)")


@contextlib.contextmanager
def _thread_limit(threads: int):
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover - depends on environment
        if threads != 1:
            logger.warning("threadpoolctl not installed; --threads ignored")
        yield
        return
    with threadpool_limits(limits=threads):
        yield


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masolve",
        description="Finite difference solvers for det(D^2 u) = f with Dirichlet data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="run a single solve")
    solve_p.add_argument("--problem", required=True)
    solve_p.add_argument("--method", required=True, choices=METHODS)
    solve_p.add_argument("--n", required=True, type=int, help="mesh points per side")
    solve_p.add_argument("--out", default=None, help="write the result as JSON")
    _add_common_solver_flags(solve_p)

    study_p = sub.add_parser("study", help="run a method x mesh-size sweep")
    study_p.add_argument("--problem", required=True)
    study_p.add_argument("--methods", required=True,
                         help=f"comma-separated subset of {','.join(METHODS)}")
    study_p.add_argument("--sizes", required=True, help="comma-separated mesh sizes")
    study_p.add_argument("--csv", default=None, help="CSV output path")
    study_p.add_argument("--json", default=None, help="JSON output path")
    study_p.add_argument("--fit", action="store_true",
                         help="print error/time slopes per method")
    study_p.add_argument("--timing-repetitions", type=int, default=1)
    study_p.add_argument("--allow-large-m1", action="store_true",
                         help="run m1 above its default size cap")
    _add_common_solver_flags(study_p)
    return parser


def _cmd_solve(args: argparse.Namespace) -> int:
    params = _parse_params(args.param)
    with _thread_limit(args.threads):
        record, payload = run_solve(
            args.problem,
            args.method,
            args.n,
            params,
            tolerance=args.tol,
            max_iterations=args.max_iter,
            det_floor=args.det_floor,
            interpolation=not args.no_interpolation,
            m1_root=args.m1_root.replace("-", "_"),
            m2_clamp=not args.no_m2_clamp,
        )
    print(
        f"{record.problem}/{record.method} N={record.n}: "
        f"converged={record.converged} iterations={record.iterations} "
        f"time={record.wall_time_seconds:.3f}s"
        + (f" sup_error={record.sup_error:.3e}" if record.sup_error is not None else "")
        + f" min={record.min_value:.6g}"
    )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_study(args: argparse.Namespace) -> int:
    config = StudyConfig(
        problem=args.problem,
        methods=[m for m in args.methods.split(",") if m],
        sizes=_parse_sizes(args.sizes),
        params=_parse_params(args.param),
        tolerance=args.tol,
        max_iterations=args.max_iter,
        det_floor=args.det_floor,
        interpolation=not args.no_interpolation,
        m1_root=args.m1_root.replace("-", "_"),
        m2_clamp=not args.no_m2_clamp,
        timing_repetitions=args.timing_repetitions,
        allow_large_m1=args.allow_large_m1,
        csv_path=args.csv,
        json_path=args.json,
    )
    with _thread_limit(args.threads):
        records = run_study(config)
    for r in records:
        err = f" sup_error={r.sup_error:.3e}" if r.sup_error is not None else ""
        print(
            f"{r.problem}/{r.method} N={r.n}: converged={r.converged} "
            f"iterations={r.iterations} time={r.wall_time_seconds:.3f}s{err}"
        )
    if args.fit:
        for (problem, method), slopes in fit_report(records).items():
            rendered = " ".join(f"{k}={v:.2f}" for k, v in slopes.items()) or "(insufficient data)"
            print(f"slopes {problem}/{method}: {rendered}")
    if args.csv:
        print(f"wrote {args.csv}")
    if args.json:
        print(f"wrote {args.json}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are configuration errors here.
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_study(args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, UnknownProblemError, MASolveError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
