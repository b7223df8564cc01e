"""CSV reading and writing for trajectories, sweeps and reports.

Numbers are written with 17 significant digits and "." decimals so values
survive a round trip; a header row is always present.
"""

import csv
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO

import numpy as np

from ..core.calculus.fracops import GridFunction
from ..core.errors import ConfigError, GridError
from ..core.variational.functional import BasisCandidate, GridCandidate
from ..core.variational.problem import VariationalProblem
from ..models import OptimalityReport

# Relative tolerance (to b - a) when checking a CSV grid against the problem interval
GRID_TOLERANCE = 1e-9


def fmt(value: float) -> str:
    return f"{value:.17g}"


def write_rows(target: "str | Path | TextIO", header: Sequence[str], rows: Iterable[Sequence]) -> None:
    def _write(handle: TextIO) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])

    if hasattr(target, "write"):
        _write(target)
        return
    with open(target, "w", newline="", encoding="utf-8") as handle:
        _write(handle)


def write_trajectory(path: "str | Path", candidate: BasisCandidate, n: int) -> None:
    """Write x, y, z = y^(α) on the uniform n-subinterval grid."""
    x = np.linspace(candidate.interval.a, candidate.interval.b, n + 1)
    y = candidate.values(x)
    z = candidate.derivative(x)
    write_rows(path, ("x", "y", "z"), zip(map(float, x), map(float, y), map(float, z)))


def read_candidate(path: "str | Path", problem: VariationalProblem) -> GridCandidate:
    """Read a grid candidate with columns x, y and optionally z.

    Raises:
        ConfigError: unreadable file, missing columns, non-numeric cells.
        GridError: too few rows, non-uniform grid, or wrong interval.
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            columns = reader.fieldnames or []
            if "x" not in columns or "y" not in columns:
                raise ConfigError(f"{path}: candidate CSV needs columns x and y, got {columns}")
            records = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read candidate {path}: {exc}") from exc

    try:
        x = np.array([float(r["x"]) for r in records])
        y = np.array([float(r["y"]) for r in records])
        z = np.array([float(r["z"]) for r in records]) if "z" in columns else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: non-numeric value in candidate CSV") from exc

    interval = problem.interval
    if x.size < 5:
        raise GridError(f"{path}: candidate needs at least 5 rows, got {x.size}")
    tol = GRID_TOLERANCE * interval.length
    expected = np.linspace(interval.a, interval.b, x.size)
    if abs(x[0] - interval.a) > tol or abs(x[-1] - interval.b) > tol:
        raise GridError(
            f"{path}: candidate spans [{x[0]}, {x[-1]}], problem interval is [{interval.a}, {interval.b}]"
        )
    if np.max(np.abs(x - expected)) > tol:
        raise GridError(f"{path}: candidate grid is not uniform")

    values = GridFunction(interval, y)
    derivative = GridFunction(interval, z) if z is not None else None
    return GridCandidate(values, derivative)


REPORT_HEADER = (
    "el_residual_max",
    "bc_a_residual",
    "bc_b_residual",
    "convexity",
    "classification",
    "objective",
)


def report_row(report: OptimalityReport) -> List:
    def _opt(value: Optional[float]) -> "float | str":
        return "n.a." if value is None else float(value)

    return [
        float(report.el_residual_max),
        _opt(report.bc_a_residual),
        _opt(report.bc_b_residual),
        report.convexity.status,
        report.classification.value,
        _opt(report.objective),
    ]


def append_report(path: "str | Path", report: OptimalityReport) -> None:
    """Append one report row, writing the header when the file is new or empty."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if new:
            writer.writerow(REPORT_HEADER)
        writer.writerow([fmt(v) if isinstance(v, float) else v for v in report_row(report)])
