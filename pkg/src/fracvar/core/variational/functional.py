"""Evaluation of J(y), Euler-Lagrange and natural boundary residuals, and
the sampled joint-convexity check behind the sufficiency test.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..config import get_settings
from ..errors import DomainError, EvaluationError, GridError
from ..calculus.fracops import (
    MIN_SUBINTERVALS,
    GridFunction,
    boundary_value,
    fractional_integral,
    jumarie_derivative,
    monomial_derivative,
)
from ..calculus.specfun import alpha_factorial
from ...models import (
    Classification,
    ConvexityOutcome,
    Counterexample,
    FractionalOrder,
    Interval,
    OptimalityReport,
)
from .problem import VariationalProblem

logger = logging.getLogger(__name__)

Array = npt.NDArray[np.float64]

# Nodes excluded at each end when taking the max-norm of the EL residual
EDGE_NODES = 3
CONVEXITY_SLACK = 1e-7


@dataclass(frozen=True)
class BasisCandidate:
    """y(x) = Σ_k c_k (x - a)^(kα), whose α-derivative is known exactly."""

    coefficients: Tuple[float, ...]
    interval: Interval
    order: FractionalOrder

    def __post_init__(self) -> None:
        coefficients = tuple(float(c) for c in self.coefficients)
        if not coefficients:
            raise DomainError("a basis candidate needs at least one coefficient")
        if not all(np.isfinite(coefficients)):
            raise DomainError("basis coefficients must be finite")
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def values(self, x: Array) -> Array:
        s = np.asarray(x, dtype=float) - self.interval.a
        alpha = self.order.alpha
        return sum(c * np.power(s, k * alpha) for k, c in enumerate(self.coefficients))

    def derivative(self, x: Array) -> Array:
        s = np.asarray(x, dtype=float) - self.interval.a
        result = np.zeros_like(s)
        # the k = 0 term is constant and differentiates to zero
        for k, c in enumerate(self.coefficients[1:], start=1):
            coefficient, exponent = monomial_derivative(k * self.order.alpha, self.order)
            result = result + c * coefficient * np.power(s, exponent)
        return result

    def at_a(self) -> float:
        return self.coefficients[0]

    def at_b(self) -> float:
        return float(self.values(np.array(self.interval.b)))


@dataclass(frozen=True)
class GridCandidate:
    """Grid samples of y, optionally with precomputed samples of y^(α)."""

    values: GridFunction
    derivative: Optional[GridFunction] = None

    def __post_init__(self) -> None:
        if self.derivative is not None and not self.values.same_grid(self.derivative):
            raise GridError("candidate derivative must share the grid of its values")


Candidate = Union[BasisCandidate, GridCandidate]


@dataclass(frozen=True)
class _Trajectory:
    """Everything L is evaluated on: (x, y(x), y^(α)(x), y(a), y(b)) on the grid."""

    interval: Interval
    x: Array
    y: Array
    z: Array
    t: float
    u: float
    exact: bool


def _trajectory(problem: VariationalProblem, y: Candidate, n: Optional[int]) -> _Trajectory:
    if isinstance(y, BasisCandidate):
        if y.interval != problem.interval:
            raise GridError("basis candidate interval differs from the problem interval")
        if y.order != problem.order:
            raise GridError("basis candidate order differs from the problem order")
        if n is None:
            n = get_settings().grid_size
        if n < MIN_SUBINTERVALS:
            raise GridError(f"grid too coarse: n={n}")
        x = np.linspace(problem.interval.a, problem.interval.b, n + 1)
        return _Trajectory(problem.interval, x, y.values(x), y.derivative(x), y.at_a(), y.at_b(), True)
    grid = y.values
    if grid.interval != problem.interval:
        raise GridError(
            f"candidate grid on [{grid.interval.a}, {grid.interval.b}] does not match "
            f"problem interval [{problem.interval.a}, {problem.interval.b}]"
        )
    z = y.derivative if y.derivative is not None else jumarie_derivative(grid, problem.order)
    return _Trajectory(grid.interval, grid.nodes, grid.values, z.values, grid.first, grid.last, False)


def _locate_failure(fn, traj: _Trajectory, exc: EvaluationError) -> EvaluationError:
    """Re-evaluate node by node to report the first x where `fn` fails."""
    for i, xi in enumerate(traj.x):
        try:
            values = fn(xi, traj.y[i], traj.z[i], traj.t, traj.u)
        except EvaluationError as inner:
            return EvaluationError(str(inner), x=float(xi))
        if not np.all(np.isfinite(values)):
            return EvaluationError("Lagrangian evaluated to a non-finite value", x=float(xi))
    return exc


def _lagrangian_values(problem: VariationalProblem, traj: _Trajectory) -> Array:
    fn = problem.lagrangian.value
    try:
        with np.errstate(all="ignore"):
            values = fn(traj.x, traj.y, traj.z, traj.t, traj.u)
    except EvaluationError as exc:
        raise _locate_failure(fn, traj, exc) from exc
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise EvaluationError("Lagrangian evaluated to a non-finite value", x=float(traj.x[bad]))
    return values


def _partials(problem: VariationalProblem, traj: _Trajectory):
    fn = problem.lagrangian.partials
    try:
        with np.errstate(all="ignore"):
            parts = fn(traj.x, traj.y, traj.z, traj.t, traj.u)
    except EvaluationError as exc:
        raise _locate_failure(fn, traj, exc) from exc
    for part in parts:
        if not np.all(np.isfinite(part)):
            bad = int(np.flatnonzero(~np.isfinite(part))[0])
            raise EvaluationError("Lagrangian partial is not finite", x=float(traj.x[bad]))
    return parts


def _grid(traj: _Trajectory, values: Array) -> GridFunction:
    return GridFunction(traj.interval, values)


def integrand(problem: VariationalProblem, y: Candidate, n: Optional[int] = None) -> GridFunction:
    """Grid samples of L(x, y(x), y^(α)(x), y(a), y(b))."""
    traj = _trajectory(problem, y, n)
    return _grid(traj, _lagrangian_values(problem, traj))


def evaluate(problem: VariationalProblem, y: Candidate, n: Optional[int] = None) -> float:
    """J(y) = ∫_a^b L(x, y, y^(α), y(a), y(b)) (dx)^α.

    Basis candidates are sampled on n subintervals (default from settings);
    grid candidates use their own grid.
    """
    return fractional_integral(integrand(problem, y, n), problem.order)


def el_residual(problem: VariationalProblem, y: Candidate, n: Optional[int] = None) -> GridFunction:
    """r(x) = ∂₂L - (d^α/dx^α) ∂₃L on the grid."""
    traj = _trajectory(problem, y, n)
    d2, d3, _, _ = _partials(problem, traj)
    return _grid(traj, d2) - jumarie_derivative(_grid(traj, d3), problem.order)


def interior_max(residual: GridFunction) -> float:
    """Max |r| with EDGE_NODES nodes dropped at each end."""
    inner = residual.values[EDGE_NODES:-EDGE_NODES]
    if inner.size == 0:
        inner = residual.values
    return float(np.max(np.abs(inner)))


def _boundary_d3(traj: _Trajectory, d3: Array) -> Tuple[float, float]:
    if traj.exact:
        return float(d3[0]), float(d3[-1])
    grid = _grid(traj, d3)
    return boundary_value(grid, "a"), boundary_value(grid, "b")


def natural_bc_residuals(
    problem: VariationalProblem, y: Candidate, n: Optional[int] = None
) -> Tuple[Optional[float], Optional[float]]:
    """Residuals of the natural boundary conditions; None for a fixed end-point.

    at_a = ∫ ∂₄L (dx)^α - α! ∂₃L|_{x=a},  at_b = ∫ ∂₅L (dx)^α + α! ∂₃L|_{x=b}.
    """
    if not (problem.at_a.is_free or problem.at_b.is_free):
        return None, None
    traj = _trajectory(problem, y, n)
    _, d3, d4, d5 = _partials(problem, traj)
    d3_a, d3_b = _boundary_d3(traj, d3)
    factorial = alpha_factorial(problem.order)
    at_a = at_b = None
    if problem.at_a.is_free:
        at_a = fractional_integral(_grid(traj, d4), problem.order) - factorial * d3_a
    if problem.at_b.is_free:
        at_b = fractional_integral(_grid(traj, d5), problem.order) + factorial * d3_b
    return at_a, at_b


def corollary_residuals(
    problem: VariationalProblem, y: Candidate, n: Optional[int] = None
) -> Tuple[Optional[float], Optional[float]]:
    """∂₃L at the free end-points, for Lagrangians independent of y(a), y(b)."""
    if problem.lagrangian.depends_on_endpoints():
        raise ValueError("the end-point-free form needs a Lagrangian independent of t and u")
    traj = _trajectory(problem, y, n)
    _, d3, _, _ = _partials(problem, traj)
    d3_a, d3_b = _boundary_d3(traj, d3)
    return (d3_a if problem.at_a.is_free else None, d3_b if problem.at_b.is_free else None)


def _box_bounds(box: Union[float, Sequence[Tuple[float, float]]]) -> Tuple[Tuple[float, float], ...]:
    if isinstance(box, (int, float)):
        return tuple((-float(box), float(box)) for _ in range(4))
    bounds = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(bounds) != 4:
        raise ValueError(f"box needs bounds for (y, z, t, u), got {len(bounds)}")
    for lo, hi in bounds:
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise ValueError(f"invalid box bounds ({lo}, {hi})")
    return bounds


def convexity_certificate(
    problem: VariationalProblem,
    sample_count: Optional[int] = None,
    box: Union[float, Sequence[Tuple[float, float]], None] = None,
    seed: Optional[int] = None,
) -> ConvexityOutcome:
    """Sample the joint convexity inequality in (y, z, t, u).

    Checks L(P+Q) - L(P) >= Σ ∂ᵢL(P) Qᵢ - slack for seeded uniform pairs
    (P, P+Q) in the box and x uniform on [a, b]. For `max` problems the
    concavity inequality is checked instead. The first violating pair in
    draw order is reported.
    """
    settings = get_settings()
    if sample_count is None:
        sample_count = settings.convexity_samples
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    bounds = _box_bounds(settings.convexity_box if box is None else box)
    seed = settings.convexity_seed if seed is None else seed
    slack = 0.0 if problem.lagrangian.exact_partials else CONVEXITY_SLACK

    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    x = rng.uniform(problem.interval.a, problem.interval.b, sample_count)
    p = rng.uniform(lo, hi, (sample_count, 4))
    q = rng.uniform(lo, hi, (sample_count, 4)) - p

    lagrangian = problem.lagrangian
    with np.errstate(all="ignore"):
        base = lagrangian.value(x, *p.T)
        shifted = lagrangian.value(x, *(p + q).T)
        gradient = np.stack(lagrangian.partials(x, *p.T), axis=1)
    increment = shifted - base
    linear = np.sum(gradient * q, axis=1)
    if not (np.all(np.isfinite(increment)) and np.all(np.isfinite(linear))):
        raise EvaluationError("Lagrangian is not finite inside the convexity box")

    if problem.sense == "min":
        violations = np.flatnonzero(increment < linear - slack)
    else:
        violations = np.flatnonzero(increment > linear + slack)

    common = dict(sense=problem.sense, samples=sample_count, seed=seed, box=bounds, slack=slack)
    if violations.size == 0:
        return ConvexityOutcome(status="certified-on-samples", **common)
    i = int(violations[0])
    counterexample = Counterexample(
        index=i,
        x=float(x[i]),
        point=tuple(float(v) for v in p[i]),
        shift=tuple(float(v) for v in q[i]),
        increment=float(increment[i]),
        linear_part=float(linear[i]),
    )
    logger.info(f"convexity counterexample for {problem.name} at sample {i}: {counterexample}")
    return ConvexityOutcome(status="counterexample", counterexample=counterexample, **common)


def default_tolerance(problem: VariationalProblem, y: Candidate) -> float:
    settings = get_settings()
    if isinstance(y, BasisCandidate) and problem.lagrangian.exact_partials:
        return settings.basis_residual_tolerance
    return settings.grid_residual_tolerance


def verify(
    problem: VariationalProblem,
    y: Candidate,
    n: Optional[int] = None,
    tolerance: Optional[float] = None,
    sample_count: Optional[int] = None,
    seed: Optional[int] = None,
    box: Union[float, Sequence[Tuple[float, float]], None] = None,
) -> OptimalityReport:
    """Check the Euler-Lagrange equation, the natural boundary conditions and
    joint convexity (concavity for `max` problems) for a candidate.
    """
    tolerance = tolerance if tolerance is not None else default_tolerance(problem, y)
    el_max = interior_max(el_residual(problem, y, n))
    bc_a, bc_b = natural_bc_residuals(problem, y, n)
    convexity = convexity_certificate(problem, sample_count, box, seed)

    residuals = [el_max] + [abs(r) for r in (bc_a, bc_b) if r is not None]
    if any(not r <= tolerance for r in residuals):
        classification = Classification.NON_STATIONARY
    elif convexity.certified:
        classification = Classification.STATIONARY_CERTIFIED
    else:
        classification = Classification.STATIONARY
    logger.info(
        f"verify {problem.name}: el={el_max:.3e} bc_a={bc_a} bc_b={bc_b} -> {classification.value}"
    )
    return OptimalityReport(
        el_residual_max=el_max,
        bc_a_residual=bc_a,
        bc_b_residual=bc_b,
        convexity=convexity,
        classification=classification,
        tolerance=tolerance,
        objective=evaluate(problem, y, n),
    )
