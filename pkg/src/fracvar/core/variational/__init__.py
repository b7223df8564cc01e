"""Variational problems, the functional J and its optimality checks, and the direct-method solver."""

from .functional import (
    BasisCandidate,
    GridCandidate,
    convexity_certificate,
    corollary_residuals,
    el_residual,
    evaluate,
    natural_bc_residuals,
    verify,
)
from .problem import (
    LagrangianSpec,
    VariationalProblem,
    builtin,
    builtin_names,
    from_expression,
)
from .solver import closed_form_ex7, local_minimality_probe, solve

__all__ = [
    "BasisCandidate",
    "GridCandidate",
    "LagrangianSpec",
    "VariationalProblem",
    "builtin",
    "builtin_names",
    "closed_form_ex7",
    "convexity_certificate",
    "corollary_residuals",
    "el_residual",
    "evaluate",
    "from_expression",
    "local_minimality_probe",
    "natural_bc_residuals",
    "solve",
    "verify",
]
