"""Exception hierarchy shared by every fracvar layer."""

from typing import Optional


class FracVarError(Exception):
    """Base class for all fracvar errors."""


class DomainError(FracVarError, ValueError):
    """An argument lies outside the domain of a formula."""


class GridError(FracVarError, ValueError):
    """A grid is too coarse, mismatched, non-uniform or on the wrong interval."""


class ExprParseError(FracVarError):
    """Malformed Lagrangian expression text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(FracVarError, ArithmeticError):
    """An expression or Lagrangian could not be evaluated."""

    def __init__(self, message: str, x: Optional[float] = None):
        if x is not None:
            message = f"{message} (at x={x:.17g})"
        super().__init__(message)
        self.x = x


class ProblemError(FracVarError, ValueError):
    """A variational problem could not be constructed."""


class ConfigError(FracVarError, ValueError):
    """Malformed problem configuration or command-line input."""


class NumericalError(FracVarError, ArithmeticError):
    """A numerical method produced a non-finite value it cannot recover from."""
