"""Operator diagnostics: measure the claimed Jumarie identities numerically.

Rows report measurements only; nothing here decides pass or fail.
"""

from typing import List, Tuple

import numpy as np

from ..core.calculus.fracops import (
    fractional_integral,
    fundamental_identity_residual,
    ibp_defect,
    jumarie_derivative,
    monomial_derivative,
    product_rule_defect,
    sample,
)
from ..models import FractionalOrder, Interval

MONOMIAL_EXPONENTS = (0.5, 1.0, 2.0)
NORMALIZATION_ENDS = (0.25, 0.5, 1.0)
# Monomial errors are measured on x >= a + 0.1 (b - a)
INTERIOR_FRACTION = 0.1

UNIT = Interval(a=0.0, b=1.0)


def monomial_error(gamma_exp: float, order: FractionalOrder, n: int) -> float:
    """Max relative error of the numerical derivative of t^γ on [0.1, 1) at interior nodes."""
    f = sample(lambda t: t**gamma_exp, UNIT, n)
    numeric = jumarie_derivative(f, order)
    coefficient, exponent = monomial_derivative(gamma_exp, order)
    x = f.nodes
    mask = x >= UNIT.a + INTERIOR_FRACTION * UNIT.length
    mask[-1] = False
    exact = coefficient * x[mask] ** exponent
    return float(np.max(np.abs(numeric.values[mask] - exact) / np.abs(exact)))


def normalization_error(order: FractionalOrder, n: int) -> float:
    """Max relative error of ∫_0^t (dτ)^α = t^α over a few end-points t."""
    errors = []
    for end in NORMALIZATION_ENDS:
        ones = sample(lambda t: np.ones_like(t), Interval(a=0.0, b=end), n)
        errors.append(abs(fractional_integral(ones, order) - end**order.alpha) / end**order.alpha)
    return max(errors)


def diagnose(order: FractionalOrder, n: int) -> List[Tuple[str, float]]:
    """Fixed list of (label, value) rows for the operator diagnostic table."""
    rows: List[Tuple[str, float]] = []
    constant = sample(lambda t: np.full_like(t, 5.0), UNIT, n)
    rows.append(("constant_rule_max_error", float(np.max(np.abs(jumarie_derivative(constant, order).values)))))
    for gamma_exp in MONOMIAL_EXPONENTS:
        rows.append((f"monomial_rel_error[gamma={gamma_exp:g}]", monomial_error(gamma_exp, order, n)))
    rows.append(("integral_normalization_rel_error", normalization_error(order, n)))
    for gamma_exp in MONOMIAL_EXPONENTS:
        v = sample(lambda t: t**gamma_exp, UNIT, n)
        rows.append((f"fundamental_identity[gamma={gamma_exp:g}]", fundamental_identity_residual(v, order)))
    power = sample(lambda t: t**order.alpha, UNIT, n)
    rows.append(("ibp_defect(t^alpha,t^alpha)", ibp_defect(power, power, order)))
    linear = sample(lambda t: t, UNIT, n)
    rows.append(("product_rule_defect(t,t)@t=1", float(product_rule_defect(linear, linear, order).last)))
    return rows


def format_table(order: FractionalOrder, n: int, rows: List[Tuple[str, float]]) -> str:
    lines = [f"{'alpha':<36}{order.alpha:.6g}", f"{'grid':<36}{n}"]
    lines += [f"{label:<36}{value:+.10f}" for label, value in rows]
    return "\n".join(lines)
