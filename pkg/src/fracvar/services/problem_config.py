"""Loading plain-text problem configs.

A config is UTF-8 text with one ``key=value`` per line and ``#`` comments::

    alpha=0.5
    a=0
    b=1
    lagrangian=builtin:ex7        # or a quoted expression, e.g. "z^2 + g*t^2"
    param.g=1
    param.l=1
    y_a=free
    y_b=free
"""

import io
import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import Dict, Literal, Optional

from dotenv.parser import parse_stream
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from ..core.errors import ConfigError, ProblemError
from ..core.variational.problem import VariationalProblem, builtin, from_expression
from ..models import EndpointCondition

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"


def _endpoint(value: Optional[float]) -> EndpointCondition:
    return EndpointCondition.free() if value is None else EndpointCondition.fixed(value)


class ProblemConfig(BaseModel):
    """Validated contents of a problem config file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float
    a: Optional[float] = None
    b: Optional[float] = None
    lagrangian: str
    params: Dict[str, float] = {}
    y_a: Optional[float] = None
    y_b: Optional[float] = None
    sense: Literal["min", "max"] = "min"

    @field_validator("y_a", "y_b", mode="before")
    @classmethod
    def _parse_endpoint(cls, value):
        if isinstance(value, str) and value.strip().lower() == "free":
            return None
        return value

    @field_validator("alpha", "a", "b", "y_a", "y_b")
    @classmethod
    def _finite(cls, value):
        if value is not None and not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @property
    def is_builtin(self) -> bool:
        return self.lagrangian.startswith(BUILTIN_PREFIX)

    def to_problem(self) -> VariationalProblem:
        """Build the VariationalProblem this config describes.

        Raises:
            ConfigError: missing a/b for an expression, or a/b contradicting a builtin.
            ProblemError, ExprParseError: from problem construction.
        """
        if self.is_builtin:
            problem = builtin(self.lagrangian[len(BUILTIN_PREFIX):], self.params, self.alpha)
            for key, given, expected in (("a", self.a, problem.interval.a), ("b", self.b, problem.interval.b)):
                if given is not None and given != expected:
                    raise ConfigError(f"{key}={given} contradicts builtin interval end-point {expected}")
            return replace(
                problem, at_a=_endpoint(self.y_a), at_b=_endpoint(self.y_b), sense=self.sense
            )
        if self.a is None or self.b is None:
            missing = [k for k, v in (("a", self.a), ("b", self.b)) if v is None]
            raise ConfigError(f"missing required key: {', '.join(missing)}")
        return from_expression(
            self.lagrangian,
            (self.a, self.b),
            self.alpha,
            _endpoint(self.y_a),
            _endpoint(self.y_b),
            self.params,
            self.sense,
        )


def parse_config(text: str) -> ProblemConfig:
    """Parse config text into a ProblemConfig.

    Lines follow the dotenv syntax, so values may be quoted and carry trailing
    ``#`` comments.

    Raises:
        ConfigError: malformed lines, duplicate or unknown keys, missing keys,
            non-numeric values.
    """
    fields: Dict[str, object] = {}
    params: Dict[str, str] = {}
    for binding in parse_stream(io.StringIO(text)):
        lineno = binding.original.line
        if binding.error or (binding.key is not None and binding.value is None):
            raise ConfigError(f"line {lineno}: expected key=value, got {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        key, value = binding.key, binding.value
        if key.startswith("param."):
            name = key[len("param."):]
            if not name.isidentifier():
                raise ConfigError(f"line {lineno}: invalid parameter name {name!r}")
            if name in params:
                raise ConfigError(f"line {lineno}: duplicate parameter {name!r}")
            params[name] = value
            continue
        if key in fields or key == "params":
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value
    fields["params"] = params
    try:
        return ProblemConfig(**fields)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc


def _describe(exc: ValidationError) -> str:
    messages = []
    for error in exc.errors():
        key = ".".join(str(part) for part in error["loc"]) or "config"
        if key.startswith("params."):
            key = "param." + key[len("params."):]
        if error["type"] == "missing":
            messages.append(f"missing required key: {key}")
        elif error["type"] == "extra_forbidden":
            messages.append(f"unknown key: {key}")
        else:
            messages.append(f"invalid value for {key}: {error['msg']}")
    return "; ".join(messages)


def load_config(path: "str | Path") -> ProblemConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = parse_config(text)
    logger.debug(f"loaded config {path}: {config}")
    return config


def load_problem(path: "str | Path") -> VariationalProblem:
    """Read a config file and build its problem; all failures surface as ConfigError
    or the problem-construction errors."""
    try:
        return load_config(path).to_problem()
    except ValidationError as exc:
        raise ProblemError(str(exc)) from exc
