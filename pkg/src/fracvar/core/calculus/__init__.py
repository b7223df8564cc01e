"""Special functions and numerical Jumarie fractional operators."""

from .fracops import (
    GridFunction,
    boundary_value,
    fractional_integral,
    fractional_integral_path,
    fundamental_identity_residual,
    ibp_defect,
    jumarie_derivative,
    monomial_derivative,
    product_rule_defect,
    riemann_liouville_integral,
    sample,
    solve_fractional_ode,
)
from .specfun import alpha_factorial, beta, gamma

__all__ = [
    "GridFunction",
    "alpha_factorial",
    "beta",
    "boundary_value",
    "fractional_integral",
    "fractional_integral_path",
    "fundamental_identity_residual",
    "gamma",
    "ibp_defect",
    "jumarie_derivative",
    "monomial_derivative",
    "product_rule_defect",
    "riemann_liouville_integral",
    "sample",
    "solve_fractional_ode",
]
