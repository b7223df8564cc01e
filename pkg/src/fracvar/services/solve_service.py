"""Service layer for solving problems and sweeping the fractional order.

This module gives the CLI a single place to run the direct method without
depending on solver internals.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import get_settings
from ..core.errors import ConfigError
from ..core.variational.problem import Ex7Lagrangian, VariationalProblem
from ..core.variational.solver import closed_form_ex7, solve
from ..models import SolveOptions, SolveReport

logger = logging.getLogger(__name__)


def solve_problem(problem: VariationalProblem, options: SolveOptions) -> SolveReport:
    """Run the direct method for one problem.

    Args:
        problem: Problem to extremize.
        options: Basis degree, grid, tolerances and initial coefficients.

    Returns:
        SolveReport including the verification pass at the solution.
    """
    return solve(problem, options)


def sweep_orders(alpha_from: float, alpha_to: float, steps: int) -> List[float]:
    """Inclusive linear grid of orders.

    Raises:
        ConfigError: unless 0 < alpha_from <= alpha_to <= 1 and steps >= 1.
    """
    if steps < 1:
        raise ConfigError(f"steps must be at least 1, got {steps}")
    if not 0.0 < alpha_from <= alpha_to <= 1.0:
        raise ConfigError(
            f"sweep range must satisfy 0 < from <= to <= 1, got from={alpha_from} to={alpha_to}"
        )
    return [float(a) for a in np.linspace(alpha_from, alpha_to, steps)]


def run_sweep(
    problem: VariationalProblem,
    alphas: Sequence[float],
    options: SolveOptions,
    workers: Optional[int] = None,
) -> List[Tuple[float, SolveReport]]:
    """Solve the problem at every order; rows come back ordered by alpha.

    Independent solves run on a thread pool; `Executor.map` restores input order.
    """
    if workers is None:
        workers = get_settings().sweep_workers
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    logger.info(f"sweeping {problem.name} over {len(alphas)} orders with {workers} workers")

    def _one(alpha: float) -> Tuple[float, SolveReport]:
        return alpha, solve(problem.with_order(alpha), options)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one, alphas))


def ex7_reference(problem: VariationalProblem) -> Optional[Tuple[float, float]]:
    """Closed-form (c_0, c_1) when the problem is ex7 with both end-points free."""
    lagrangian = problem.lagrangian
    if not isinstance(lagrangian, Ex7Lagrangian):
        return None
    if not (problem.at_a.is_free and problem.at_b.is_free):
        return None
    return closed_form_ex7(lagrangian.g, lagrangian.l, problem.order)
