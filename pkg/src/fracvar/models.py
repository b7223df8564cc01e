"""Pydantic models shared by the calculus, variational and CLI layers."""

import math
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .core.errors import DomainError, ProblemError


class FractionalOrder(BaseModel):
    """Order α of the Jumarie derivative and of the (dτ)^α integral.

    Only 0 < α ≤ 1 is supported; α = 1 is the classical limit.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float

    @field_validator("alpha")
    @classmethod
    def _check_range(cls, value: float) -> float:
        if not math.isfinite(value) or not 0.0 < value <= 1.0:
            raise ValueError(f"fractional order must satisfy 0 < alpha <= 1, got {value}")
        return value

    @property
    def is_classical(self) -> bool:
        return self.alpha == 1.0


def as_order(value: "float | FractionalOrder") -> FractionalOrder:
    """Coerce a float into a validated order, raising DomainError when invalid."""
    if isinstance(value, FractionalOrder):
        return value
    try:
        return FractionalOrder(alpha=float(value))
    except (ValidationError, TypeError, ValueError) as exc:
        raise DomainError(f"order out of range: {value!r}") from exc


class Interval(BaseModel):
    """Closed interval [a, b] with a < b."""

    model_config = ConfigDict(frozen=True)

    a: float
    b: float

    @model_validator(mode="after")
    def _check_bounds(self) -> "Interval":
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval end-points must be finite")
        if not self.a < self.b:
            raise ValueError(f"interval requires a < b, got [{self.a}, {self.b}]")
        return self

    @property
    def length(self) -> float:
        return self.b - self.a


def make_interval(a: float, b: float) -> Interval:
    """Build an Interval, raising ProblemError on invalid bounds."""
    try:
        return Interval(a=a, b=b)
    except ValidationError as exc:
        raise ProblemError(f"invalid interval [{a}, {b}]") from exc


class EndpointCondition(BaseModel):
    """Either a fixed value y(a)/y(b) or a free end-point."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed", "free"]
    value: Optional[float] = None

    @model_validator(mode="after")
    def _check_value(self) -> "EndpointCondition":
        if self.kind == "fixed":
            if self.value is None or not math.isfinite(self.value):
                raise ValueError("a fixed end-point needs a finite value")
        elif self.value is not None:
            raise ValueError("a free end-point carries no value")
        return self

    @classmethod
    def free(cls) -> "EndpointCondition":
        return cls(kind="free")

    @classmethod
    def fixed(cls, value: float) -> "EndpointCondition":
        return cls(kind="fixed", value=value)

    @property
    def is_free(self) -> bool:
        return self.kind == "free"

    def __str__(self) -> str:
        return "free" if self.is_free else f"{self.value:.17g}"


class SolveOptions(BaseModel):
    """Options of the direct method."""

    model_config = ConfigDict(frozen=True)

    basis_degree: int = Field(default=1, ge=1)
    grid: int = Field(default=1000, ge=100)
    step_tolerance: float = Field(default=1e-10, gt=0)
    max_iterations: int = Field(default=100_000, ge=1)
    # None means start from the zero vector
    initial_coefficients: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_initial(self) -> "SolveOptions":
        init = self.initial_coefficients
        if init is not None:
            if len(init) != self.basis_degree + 1:
                raise ValueError(
                    f"expected {self.basis_degree + 1} initial coefficients, got {len(init)}"
                )
            if not all(math.isfinite(c) for c in init):
                raise ValueError("initial coefficients must be finite")
        return self


class Classification(StrEnum):
    NON_STATIONARY = "non-stationary"
    STATIONARY = "stationary"
    STATIONARY_CERTIFIED = "stationary+certified"


class Counterexample(BaseModel):
    """A sampled pair (P, P+Q) violating the convexity (concavity) inequality."""

    model_config = ConfigDict(frozen=True)

    index: int
    x: float
    point: Tuple[float, float, float, float]
    shift: Tuple[float, float, float, float]
    increment: float
    linear_part: float


class ConvexityOutcome(BaseModel):
    """Result of the sampled joint-convexity check, with reproducibility metadata."""

    model_config = ConfigDict(frozen=True)

    status: Literal["certified-on-samples", "counterexample", "not-checked"]
    sense: Literal["min", "max"] = "min"
    samples: int = 0
    seed: Optional[int] = None
    box: Optional[Tuple[Tuple[float, float], ...]] = None
    slack: float = 0.0
    counterexample: Optional[Counterexample] = None

    @property
    def certified(self) -> bool:
        return self.status == "certified-on-samples"


class OptimalityReport(BaseModel):
    """Euler-Lagrange and natural boundary residuals plus the sufficiency check.

    Boundary residuals are None when the corresponding end-point is fixed.
    """

    model_config = ConfigDict(frozen=True)

    el_residual_max: float
    bc_a_residual: Optional[float]
    bc_b_residual: Optional[float]
    convexity: ConvexityOutcome
    classification: Classification
    tolerance: float
    objective: Optional[float] = None


class SolveReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    coefficients: Tuple[float, ...]
    objective: float
    iterations: int
    converged: bool
    final_step: float
    message: str
    history: Tuple[float, ...] = ()
    optimality: Optional[OptimalityReport] = None
