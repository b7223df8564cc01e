"""Direct method: minimize J over the fractional-monomial basis {(x - a)^(kα)}.

Fixed end-points are eliminated from the decision vector: y(a) = c_0 because
every k >= 1 term vanishes at a, and y(b) fixes c_K through
Σ c_k (b - a)^(kα) = y_b. The remaining coefficients are optimized by
steepest descent with a central-difference gradient and Armijo backtracking.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..errors import EvaluationError, NumericalError
from ..calculus.fracops import GridFunction, fractional_integral
from ..calculus.specfun import alpha_factorial
from ...models import FractionalOrder, SolveOptions, SolveReport, as_order
from .functional import BasisCandidate, integrand, verify
from .problem import VariationalProblem

logger = logging.getLogger(__name__)

Array = npt.NDArray[np.float64]

GRADIENT_STEP = 1e-6
ARMIJO = 1e-4
MAX_HALVINGS = 20
# Relative decrease of the merit above its rounding level; only such steps let the
# next line search start from a longer trial step
RESOLVED_DECREASE = 1e-12


class BasisParametrization:
    """Maps the free coefficients to the full vector c_0..c_K."""

    def __init__(self, problem: VariationalProblem, degree: int):
        self.problem = problem
        self.degree = degree
        alpha = problem.order.alpha
        length = problem.interval.length
        self.powers = np.array([length ** (k * alpha) for k in range(degree + 1)])
        fixed = set()
        if not problem.at_a.is_free:
            fixed.add(0)
        if not problem.at_b.is_free:
            fixed.add(degree)
        self.free = np.array([k for k in range(degree + 1) if k not in fixed], dtype=int)

    @property
    def size(self) -> int:
        return int(self.free.size)

    def full(self, free: Array) -> Array:
        c = np.zeros(self.degree + 1)
        c[self.free] = free
        if not self.problem.at_a.is_free:
            c[0] = self.problem.at_a.value
        if not self.problem.at_b.is_free:
            partial_sum = float(np.dot(c[:-1], self.powers[:-1]))
            c[-1] = (self.problem.at_b.value - partial_sum) / self.powers[-1]
        return c

    def restrict(self, coefficients: Sequence[float]) -> Array:
        return np.asarray(coefficients, dtype=float)[self.free]

    def candidate(self, free: Array) -> BasisCandidate:
        return BasisCandidate(tuple(self.full(free)), self.problem.interval, self.problem.order)


class _Objective:
    """The minimized merit: J for `min` problems and -J for `max` problems."""

    def __init__(self, problem: VariationalProblem, basis: BasisParametrization, n: int):
        self.problem = problem
        self.basis = basis
        self.n = n
        self.sign = 1.0 if problem.sense == "min" else -1.0

    def samples(self, free: Array) -> GridFunction:
        return integrand(self.problem, self.basis.candidate(free), self.n) * self.sign

    def __call__(self, free: Array) -> float:
        return fractional_integral(self.samples(free), self.problem.order)

    def safe(self, free: Array) -> float:
        try:
            value = self(free)
        except EvaluationError:
            return float("inf")
        return value if np.isfinite(value) else float("inf")

    def gradient(self, free: Array) -> Array:
        """Central differences with step GRADIENT_STEP.

        The two integrands are subtracted node by node and the difference is
        integrated, so rounding enters at the size of single L values rather
        than at the size of J.
        """
        grad = np.empty_like(free)
        for i in range(free.size):
            e = np.zeros_like(free)
            e[i] = GRADIENT_STEP
            difference = self.samples(free + e) - self.samples(free - e)
            grad[i] = fractional_integral(difference, self.problem.order) / (2.0 * GRADIENT_STEP)
        return grad


def solve(problem: VariationalProblem, options: Optional[SolveOptions] = None) -> SolveReport:
    """Steepest descent over the basis coefficients, followed by a verification pass.

    Each line search halves the trial step until the Armijo condition holds,
    starting from the step accepted last time. The starting step doubles (up
    to 1) only after a decrease of the merit that rounding cannot explain.
    Convergence means an accepted step shorter than `step_tolerance`; a line
    search that fails after MAX_HALVINGS halvings ends the run unconverged.

    Raises:
        NumericalError: the objective is not finite at the initial point.
        EvaluationError: the Lagrangian cannot be evaluated at the initial point.
    """
    options = options or SolveOptions()
    basis = BasisParametrization(problem, options.basis_degree)
    objective = _Objective(problem, basis, options.grid)

    if options.initial_coefficients is not None:
        x = basis.restrict(options.initial_coefficients)
    else:
        x = np.zeros(basis.size)
    f = objective(x)
    if not np.isfinite(f):
        raise NumericalError(f"objective is not finite at the initial point: {f}")

    logger.info(
        f"solving {problem.name}: alpha={problem.order.alpha}, K={options.basis_degree}, "
        f"free={basis.size}, n={options.grid}"
    )
    history: List[float] = [f]
    iterations = 0
    final_step = 0.0
    converged = False
    message = "maximum iterations reached"
    t = 1.0

    if basis.size == 0:
        converged, message = True, "no free coefficients after end-point elimination"

    while not converged and iterations < options.max_iterations:
        g = objective.gradient(x)
        direction = -g
        slope = float(np.dot(g, direction))
        if slope == 0.0:
            converged, final_step, message = True, 0.0, "zero gradient"
            break

        accepted = None
        for _ in range(MAX_HALVINGS + 1):
            trial = x + t * direction
            f_trial = objective.safe(trial)
            if f_trial <= f + ARMIJO * t * slope:
                accepted = (trial, f_trial)
                break
            t *= 0.5
        if accepted is None:
            message = f"line search failed after {MAX_HALVINGS} halvings"
            logger.warning(f"{problem.name}: {message} at iteration {iterations}")
            break

        trial, f_trial = accepted
        final_step = float(np.linalg.norm(trial - x))
        if f - f_trial > RESOLVED_DECREASE * abs(f):
            t = min(1.0, 2.0 * t)
        x, f = trial, f_trial
        history.append(f)
        iterations += 1
        if iterations % 1000 == 0:
            logger.debug(f"iteration {iterations}: merit={f:.17g} step={final_step:.3e}")
        if final_step < options.step_tolerance:
            converged, message = True, "step below tolerance"

    coefficients = basis.full(x)
    candidate = BasisCandidate(tuple(coefficients), problem.interval, problem.order)
    optimality = verify(problem, candidate, options.grid)
    logger.info(
        f"{problem.name}: {message}; iterations={iterations} objective={optimality.objective:.10g} "
        f"classification={optimality.classification.value}"
    )
    return SolveReport(
        coefficients=tuple(float(c) for c in coefficients),
        objective=float(optimality.objective),
        iterations=iterations,
        converged=converged,
        final_step=final_step,
        message=message,
        history=tuple(history),
        optimality=optimality,
    )


def local_minimality_probe(
    problem: VariationalProblem,
    coefficients: Sequence[float],
    n: int = 1000,
    count: int = 100,
    radius: float = 1e-2,
    seed: int = 0,
    slack: float = 1e-6,
) -> int:
    """Number of seeded perturbations h (|h| = radius) with J(y + h) >= J(y) - slack.

    Only free coefficients are perturbed; fixed end-points are re-eliminated.
    For `max` problems the inequality is reversed.
    """
    basis = BasisParametrization(problem, len(coefficients) - 1)
    objective = _Objective(problem, basis, n)
    base = basis.restrict(coefficients)
    if basis.size == 0:
        return count
    reference = objective(base)
    rng = np.random.default_rng(seed)
    passed = 0
    for _ in range(count):
        h = rng.standard_normal(basis.size)
        h *= radius / np.linalg.norm(h)
        if objective(base + h) >= reference - slack:
            passed += 1
    return passed


def closed_form_ex7(g: float, l: float, alpha: "float | FractionalOrder") -> Tuple[float, float]:
    """(c_0, c_1) of the minimizer c_0 + c_1 x^α of z² + g t² + l (u - 1)² on [0, 1].

    Solution of the natural boundary conditions with ∫_0^1 (dx)^α = 1:
    c_1 = g l / D, c_0 = (α!)² l / D, D = g l + (α!)² (l + g).
    """
    factorial_sq = alpha_factorial(as_order(alpha)) ** 2
    denominator = g * l + factorial_sq * (l + g)
    return factorial_sq * l / denominator, g * l / denominator
