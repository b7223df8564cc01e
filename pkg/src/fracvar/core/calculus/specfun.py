"""Gamma function and the α! := Γ(1+α) shorthand."""

from typing import overload

import numpy as np
import numpy.typing as npt
from scipy import special

from ..errors import DomainError
from ...models import FractionalOrder, as_order


@overload
def gamma(x: float) -> float: ...
@overload
def gamma(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]: ...


def gamma(x):
    """Γ(x) for positive real x (scalar or array).

    Raises:
        DomainError: if any argument is non-positive or non-finite.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"gamma is only defined here for finite x > 0, got {x!r}")
    result = special.gamma(arr)
    if np.ndim(result) == 0:
        return float(result)
    return result


def alpha_factorial(order: "FractionalOrder | float") -> float:
    """α! = Γ(1 + α)."""
    return gamma(1.0 + as_order(order).alpha)


def beta(p: float, q: float) -> float:
    """Euler Beta function B(p, q) for p, q > 0."""
    if not (p > 0 and q > 0):
        raise DomainError(f"beta needs positive arguments, got ({p}, {q})")
    return float(special.beta(p, q))
