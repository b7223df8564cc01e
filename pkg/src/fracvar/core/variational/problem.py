"""Variational problem definitions and the registry of built-in problems.

A problem is J(y) = ∫_a^b L(x, y(x), y^(α)(x), y(a), y(b)) (dx)^α with
optional end-point conditions. Lagrangians expose their value and the four
partials ∂₂L..∂₅L with respect to (y, z, t, u).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Literal, Mapping, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..errors import DomainError, ProblemError
from ..calculus.specfun import alpha_factorial
from ..expr.exprlang import VARIABLES, EvalEnv, ExprNode, eval_expr, names, parameters, parse_expr, partial
from ...models import EndpointCondition, FractionalOrder, Interval, as_order, make_interval

logger = logging.getLogger(__name__)

Array = npt.NDArray[np.float64]
Partials = Tuple[Array, Array, Array, Array]


class LagrangianSpec(ABC):
    """L(x, y, z, t, u) with z = y^(α)(x), t = y(a), u = y(b)."""

    #: True when partials are hand-coded rather than finite differences
    exact_partials: bool = False

    def __init__(self, name: str, params: Mapping[str, float]):
        self.name = name
        self.params: Dict[str, float] = dict(params)

    @abstractmethod
    def value(self, x, y, z, t, u) -> Array: ...

    @abstractmethod
    def partials(self, x, y, z, t, u) -> Partials:
        """(∂₂L, ∂₃L, ∂₄L, ∂₅L), broadcast to a common shape."""

    def depends_on_endpoints(self) -> bool:
        return True

    def at_order(self, order: FractionalOrder) -> "LagrangianSpec":
        """Copy for another order; only Lagrangians with explicit α terms change."""
        return self

    def describe(self) -> str:
        return self.name


def _broadcast(*arrays) -> Partials:
    return tuple(np.asarray(a, dtype=float) for a in np.broadcast_arrays(*arrays))


class Ex6Lagrangian(LagrangianSpec):
    """[ (x^α/α!) z² - 2 x^α z ]² + (t - 1)² + (u - 2)²."""

    exact_partials = True

    def __init__(self, order: FractionalOrder):
        super().__init__("ex6", {})
        self.order = order
        self._factorial = alpha_factorial(order)

    def _bracket(self, x, z):
        xa = np.power(x, self.order.alpha)
        return xa, xa * (z * z / self._factorial - 2.0 * z)

    def value(self, x, y, z, t, u):
        _, bracket = self._bracket(x, z)
        return _broadcast(bracket**2 + (t - 1.0) ** 2 + (u - 2.0) ** 2, y)[0]

    def partials(self, x, y, z, t, u):
        xa, bracket = self._bracket(x, z)
        dz = 2.0 * bracket * (2.0 * xa * z / self._factorial - 2.0 * xa)
        return _broadcast(np.zeros_like(dz), dz, 2.0 * (t - 1.0), 2.0 * (u - 2.0))

    def at_order(self, order):
        return Ex6Lagrangian(order)


class Ex7Lagrangian(LagrangianSpec):
    """z² + γ t² + λ (u - 1)², with γ -> "g" and λ -> "l"."""

    exact_partials = True

    def __init__(self, g: float, l: float, name: str = "ex7"):
        super().__init__(name, {"g": g, "l": l})
        self.g = g
        self.l = l

    def value(self, x, y, z, t, u):
        return _broadcast(z * z + self.g * t * t + self.l * (u - 1.0) ** 2, x, y)[0]

    def partials(self, x, y, z, t, u):
        dz = 2.0 * np.asarray(z, dtype=float)
        return _broadcast(np.zeros_like(dz), dz, 2.0 * self.g * t, 2.0 * self.l * (u - 1.0), x)[:4]


class ExpressionLagrangian(LagrangianSpec):
    """Lagrangian from expression text; partials by central finite differences."""

    def __init__(self, source: str, node: ExprNode, params: Mapping[str, float]):
        super().__init__("expression", params)
        self.source = source
        self.node = node
        unbound = parameters(node) - set(self.params)
        if unbound:
            raise ProblemError(f"unbound Lagrangian parameters: {', '.join(sorted(unbound))}")

    def _env(self, x, y, z, t, u) -> EvalEnv:
        return EvalEnv(x=x, y=y, z=z, t=t, u=u, parameters=self.params)

    def value(self, x, y, z, t, u):
        env = self._env(x, y, z, t, u)
        return _broadcast(eval_expr(self.node, env), x, y, z, t, u)[0]

    def partials(self, x, y, z, t, u):
        env = self._env(x, y, z, t, u)
        return _broadcast(*(partial(self.node, v, env) for v in VARIABLES[1:]), x, y, z)[:4]

    def depends_on_endpoints(self) -> bool:
        return bool({"t", "u"} & _free_slots(self.node))

    def describe(self) -> str:
        return self.source


def _free_slots(node: ExprNode) -> FrozenSet[str]:
    return frozenset(n for n in names(node) if n in VARIABLES)


@dataclass(frozen=True)
class VariationalProblem:
    """J(y) -> extremum over continuous y on `interval`, with optional end-point values."""

    interval: Interval
    order: FractionalOrder
    lagrangian: LagrangianSpec
    at_a: EndpointCondition = field(default_factory=EndpointCondition.free)
    at_b: EndpointCondition = field(default_factory=EndpointCondition.free)
    sense: Literal["min", "max"] = "min"
    name: str = "problem"
    # set for problems that only exist at their own order
    fixed_order: bool = False

    def with_order(self, alpha: "float | FractionalOrder") -> "VariationalProblem":
        order = as_order(alpha)
        if self.fixed_order and order != self.order:
            raise ProblemError(f"{self.name} is defined at alpha={self.order.alpha:g} only")
        return replace(self, order=order, lagrangian=self.lagrangian.at_order(order))


def _build_ex6(params: Mapping[str, float], order: FractionalOrder) -> VariationalProblem:
    if params:
        raise ProblemError(f"ex6 takes no parameters, got {', '.join(sorted(params))}")
    return VariationalProblem(
        interval=Interval(a=0.0, b=1.0), order=order, lagrangian=Ex6Lagrangian(order), name="ex6"
    )


def _ex7_parameters(params: Mapping[str, float]) -> Tuple[float, float]:
    unknown = set(params) - {"g", "l"}
    if unknown:
        raise ProblemError(f"unknown ex7 parameters: {', '.join(sorted(unknown))}")
    missing = {"g", "l"} - set(params)
    if missing:
        raise ProblemError(f"missing ex7 parameters: {', '.join(sorted(missing))}")
    g, l = float(params["g"]), float(params["l"])
    if not (g > 0 and l > 0 and np.isfinite(g) and np.isfinite(l)):
        raise ProblemError(f"ex7 needs g > 0 and l > 0, got g={g}, l={l}")
    return g, l


def _build_ex7(params: Mapping[str, float], order: FractionalOrder) -> VariationalProblem:
    g, l = _ex7_parameters(params)
    return VariationalProblem(
        interval=Interval(a=0.0, b=1.0), order=order, lagrangian=Ex7Lagrangian(g, l), name="ex7"
    )


def _build_classical_ex7(params: Mapping[str, float], order: FractionalOrder) -> VariationalProblem:
    g, l = _ex7_parameters(params)
    return VariationalProblem(
        interval=Interval(a=0.0, b=1.0),
        order=FractionalOrder(alpha=1.0),
        lagrangian=Ex7Lagrangian(g, l, name="classical_ex7"),
        name="classical_ex7",
        fixed_order=True,
    )


_REGISTRY: Dict[str, Callable[[Mapping[str, float], FractionalOrder], VariationalProblem]] = {
    "ex6": _build_ex6,
    "ex7": _build_ex7,
    "classical_ex7": _build_classical_ex7,
}


def builtin_names() -> Tuple[str, ...]:
    return tuple(_REGISTRY)


def builtin(
    name: str, params: Optional[Mapping[str, float]] = None, alpha: "float | FractionalOrder" = 0.5
) -> VariationalProblem:
    """Build one of the registered problems (both end-points free on [0, 1]).

    classical_ex7 always uses α = 1.

    Raises:
        ProblemError: unknown name, unknown or missing parameter.
    """
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ProblemError(
            f"unknown builtin problem {name!r}; choose one of {', '.join(_REGISTRY)}"
        ) from None
    try:
        order = as_order(alpha)
    except DomainError as exc:
        raise ProblemError(str(exc)) from exc
    return factory(dict(params or {}), order)


def from_expression(
    source: str,
    interval: "Interval | Tuple[float, float]",
    order: "FractionalOrder | float",
    at_a: Optional[EndpointCondition] = None,
    at_b: Optional[EndpointCondition] = None,
    params: Optional[Mapping[str, float]] = None,
    sense: Literal["min", "max"] = "min",
) -> VariationalProblem:
    """Problem whose Lagrangian is given as expression text.

    Raises:
        ExprParseError: the source does not parse.
        ProblemError: invalid interval or order, or unbound parameters.
    """
    node = parse_expr(source)
    if not isinstance(interval, Interval):
        interval = make_interval(*interval)
    try:
        order = as_order(order)
    except DomainError as exc:
        raise ProblemError(str(exc)) from exc
    lagrangian = ExpressionLagrangian(source, node, params or {})
    logger.debug(f"expression problem {source!r} on [{interval.a}, {interval.b}], alpha={order.alpha}")
    return VariationalProblem(
        interval=interval,
        order=order,
        lagrangian=lagrangian,
        at_a=at_a or EndpointCondition.free(),
        at_b=at_b or EndpointCondition.free(),
        sense=sense,
        name="expression",
    )


__all__ = [
    "Ex6Lagrangian",
    "Ex7Lagrangian",
    "ExpressionLagrangian",
    "LagrangianSpec",
    "VariationalProblem",
    "builtin",
    "builtin_names",
    "from_expression",
]
