"""Command-line front end.

Exit codes:
    0  success (solve converged, verify found a stationary candidate)
    1  malformed config, flags or candidate
    2  numerical failure (Lagrangian not evaluable, non-finite objective)
    3  solver did not converge
    4  verify classified the candidate as non-stationary

Reports go to stdout as fixed-field ``name value`` lines; logs go to stderr.
Expressions use ``^`` for powers, right-associative (``2^3^2`` is ``2^9``).
"""

import argparse
import logging
import math
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .core.config import get_settings
from .core.errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    ExprParseError,
    GridError,
    NumericalError,
    ProblemError,
)
from .core.variational.functional import BasisCandidate, verify
from .core.variational.problem import builtin_names
from .models import Classification, FractionalOrder, OptimalityReport, SolveOptions, SolveReport, as_order
from .services import csv_io, diagnostics
from .services.problem_config import load_problem
from .services.solve_service import ex7_reference, run_sweep, solve_problem, sweep_orders

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_NOT_CONVERGED = 3
EXIT_NON_STATIONARY = 4

FIELD = 16


class _ArgumentParser(argparse.ArgumentParser):
    """Argument errors become ConfigError (exit 1) instead of argparse's exit 2."""

    def error(self, message: str):
        raise ConfigError(message)


def _floats(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected finite comma-separated numbers, got {text!r}")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _line(name: str, value) -> str:
    return f"{name:<{FIELD}}{value}"


def _optional(value: Optional[float]) -> str:
    return "n.a." if value is None else f"{value:.10g}"


def format_report(report: OptimalityReport) -> List[str]:
    lines = [
        _line("el_residual", f"{report.el_residual_max:.10g}"),
        _line("bc_a_residual", _optional(report.bc_a_residual)),
        _line("bc_b_residual", _optional(report.bc_b_residual)),
        _line("tolerance", f"{report.tolerance:g}"),
        _line("convexity", report.convexity.status),
    ]
    convexity = report.convexity
    if convexity.status != "not-checked":
        lines.append(_line("samples", f"{convexity.samples} (seed {convexity.seed})"))
    if convexity.counterexample is not None:
        ce = convexity.counterexample
        lines.append(
            _line("counterexample", f"x={ce.x:.6g} P={tuple(round(v, 6) for v in ce.point)} "
                  f"Q={tuple(round(v, 6) for v in ce.shift)}")
        )
    if report.objective is not None:
        lines.append(_line("objective", f"{report.objective:.10g}"))
    lines.append(_line("classification", report.classification.value))
    return lines


def format_solve(report: SolveReport) -> List[str]:
    lines = [_line("coefficients", " ".join(f"{c:.10g}" for c in report.coefficients))]
    lines += [_line(f"c{k}", f"{c:.10g}") for k, c in enumerate(report.coefficients)]
    lines += [
        _line("objective", f"{report.objective:.10g}"),
        _line("iterations", report.iterations),
        _line("converged", "yes" if report.converged else "no"),
        _line("message", report.message),
    ]
    if report.optimality is not None:
        lines += [line for line in format_report(report.optimality) if not line.startswith("objective")]
    return lines


def _options(args: argparse.Namespace) -> SolveOptions:
    try:
        return SolveOptions(
            basis_degree=args.basis,
            grid=args.grid,
            step_tolerance=args.tol,
            max_iterations=args.max_iter,
            initial_coefficients=tuple(args.init) if args.init else None,
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid solver options: {exc.errors()[0]['msg']}") from exc


def cmd_solve(args: argparse.Namespace) -> int:
    problem = load_problem(args.config)
    report = solve_problem(problem, _options(args))
    print(_line("problem", problem.name))
    print(_line("alpha", f"{problem.order.alpha:g}"))
    for line in format_solve(report):
        print(line)
    reference = ex7_reference(problem)
    if reference is not None:
        print(_line("closed_form", " ".join(f"{c:.10g}" for c in reference)))
    if args.out:
        candidate = BasisCandidate(report.coefficients, problem.interval, problem.order)
        csv_io.write_trajectory(args.out, candidate, args.grid)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_verify(args: argparse.Namespace) -> int:
    problem = load_problem(args.config)
    if args.candidate:
        candidate = csv_io.read_candidate(args.candidate, problem)
    else:
        candidate = BasisCandidate(tuple(args.coeffs), problem.interval, problem.order)
    report = verify(problem, candidate, args.grid, args.tol, args.samples, args.seed)
    print(_line("problem", problem.name))
    print(_line("alpha", f"{problem.order.alpha:g}"))
    for line in format_report(report):
        print(line)
    if args.csv:
        csv_io.append_report(args.csv, report)
    if report.classification == Classification.NON_STATIONARY:
        return EXIT_NON_STATIONARY
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    order: FractionalOrder = as_order(args.alpha)
    if args.grid < 4:
        raise ConfigError(f"--grid must be at least 4, got {args.grid}")
    rows = diagnostics.diagnose(order, args.grid)
    print(diagnostics.format_table(order, args.grid, rows))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    alphas = sweep_orders(args.alpha_from, args.alpha_to, args.steps)
    problem = load_problem(args.config)
    results = run_sweep(problem, alphas, _options(args), args.workers)
    degree = args.basis
    header = ["alpha"] + [f"c{k}" for k in range(degree + 1)] + ["objective", "converged"]
    rows = [
        [alpha, *report.coefficients, report.objective, "true" if report.converged else "false"]
        for alpha, report in results
    ]
    csv_io.write_rows(args.out or sys.stdout, header, rows)
    # stdout may carry the CSV, so closed-form references go to stderr
    for alpha, _ in results:
        reference = ex7_reference(problem.with_order(alpha))
        if reference is not None:
            print(_line("closed_form", f"alpha={alpha:.6g} " + " ".join(f"{c:.10g}" for c in reference)),
                  file=sys.stderr)
    return EXIT_OK if all(report.converged for _, report in results) else EXIT_NOT_CONVERGED


def cmd_builtins(args: argparse.Namespace) -> int:
    for name in builtin_names():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = _ArgumentParser(
        prog="fracvar",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level for stderr")
    parser.add_argument(
        "-v", "--verbose", dest="log_level", action="store_const", const="DEBUG", help="same as --log-level DEBUG"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def solver_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("config", help="problem config file (key=value lines)")
        sub.add_argument("--basis", type=int, default=settings.basis_degree, help="basis degree K")
        sub.add_argument("--grid", type=int, default=settings.grid_size, help="grid subintervals n")
        sub.add_argument("--tol", type=float, default=settings.step_tolerance, help="step tolerance")
        sub.add_argument("--max-iter", type=int, default=settings.max_iterations)
        sub.add_argument("--init", type=_floats, help="initial coefficients c0,c1,...")
        sub.add_argument("--out", help="CSV output path")

    solve_cmd = commands.add_parser(
        "solve", help="minimize J over the fractional-monomial basis",
        description="Prints coefficients, objective, iterations and classification; "
        "--out writes columns x,y,z with z = y^(alpha).",
    )
    solver_flags(solve_cmd)
    solve_cmd.set_defaults(handler=cmd_solve)

    verify_cmd = commands.add_parser(
        "verify", help="check Euler-Lagrange, natural boundary and convexity conditions"
    )
    verify_cmd.add_argument("config")
    source = verify_cmd.add_mutually_exclusive_group(required=True)
    source.add_argument("--candidate", help="CSV with columns x,y (optional z) on a uniform grid")
    source.add_argument("--coeffs", type=_floats, help="basis coefficients c0,c1,...")
    verify_cmd.add_argument("--grid", type=int, default=settings.grid_size)
    verify_cmd.add_argument("--tol", type=float, default=None, help="residual tolerance")
    verify_cmd.add_argument("--samples", type=_positive_int, default=settings.convexity_samples)
    verify_cmd.add_argument("--seed", type=int, default=settings.convexity_seed)
    verify_cmd.add_argument("--csv", help="append the report as a CSV row")
    verify_cmd.set_defaults(handler=cmd_verify)

    diagnose_cmd = commands.add_parser("diagnose", help="measure operator identities numerically")
    diagnose_cmd.add_argument("--alpha", type=float, required=True)
    diagnose_cmd.add_argument("--grid", type=int, default=settings.grid_size)
    diagnose_cmd.set_defaults(handler=cmd_diagnose)

    sweep_cmd = commands.add_parser("sweep", help="solve over an inclusive grid of orders")
    solver_flags(sweep_cmd)
    sweep_cmd.add_argument("--alpha-from", type=float, required=True)
    sweep_cmd.add_argument("--alpha-to", type=float, required=True)
    sweep_cmd.add_argument("--steps", type=int, required=True)
    sweep_cmd.add_argument("--workers", type=_positive_int, default=settings.sweep_workers)
    sweep_cmd.set_defaults(handler=cmd_sweep)

    builtins_cmd = commands.add_parser("builtins", help="list built-in problems")
    builtins_cmd.set_defaults(handler=cmd_builtins)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        try:
            logging.basicConfig(
                level=args.log_level.upper(),
                stream=sys.stderr,
                format="%(levelname)s %(name)s: %(message)s",
            )
        except ValueError as exc:
            raise ConfigError(f"invalid log level {args.log_level!r}") from exc
        return args.handler(args)
    except (ConfigError, ProblemError, ExprParseError, GridError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EvaluationError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
