"""A small arithmetic language for Lagrangians L(x, y, z, t, u).

Grammar, loosest binding first::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          # right-associative
    atom   := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

Names x, y, z, t, u are the Lagrangian slots (z = y^(α)(x), t = y(a),
u = y(b)); any other name is a parameter bound at evaluation time.
Evaluation is vectorized over numpy arrays.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Mapping, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..errors import DomainError, EvaluationError, ExprParseError
from ..calculus.specfun import gamma

VARIABLES: Tuple[str, ...] = ("x", "y", "z", "t", "u")

Value = Union[float, npt.NDArray[np.float64]]


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Name:
    """A Lagrangian slot or a named parameter."""

    name: str


@dataclass(frozen=True)
class Neg:
    operand: "ExprNode"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "ExprNode"


ExprNode = Union[Const, Name, Neg, BinOp, Call]


def _checked_ln(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if np.any(v <= 0.0):
        raise EvaluationError("ln of a non-positive number")
    return np.log(v)


def _checked_sqrt(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if np.any(v < 0.0):
        raise EvaluationError("sqrt of a negative number")
    return np.sqrt(v)


def _checked_gamma(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    try:
        return np.asarray(gamma(v), dtype=float)
    except DomainError as exc:
        raise EvaluationError(str(exc)) from exc


FUNCTIONS: Dict[str, Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]] = {
    "gamma": _checked_gamma,
    "abs": np.abs,
    "exp": np.exp,
    "ln": _checked_ln,
    "sqrt": _checked_sqrt,
}

# Binding power and associativity of binary operators
_BINARY: Dict[str, Tuple[int, str]] = {
    "+": (1, "left"),
    "-": (1, "left"),
    "*": (2, "left"),
    "/": (2, "left"),
    "^": (4, "right"),
}
_UNARY_PREC = 3

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(source: str) -> List[Token]:
    """Split source text into tokens; the last token is always `end`."""
    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if match is None:
            raise ExprParseError(f"unexpected character {source[pos]!r}", len(source[:pos].encode()))
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), len(source[:pos].encode())))
        pos = match.end()
    tokens.append(Token("end", "", len(source.encode())))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token.text != text or token.kind != "op":
            found = "end of input" if token.kind == "end" else repr(token.text)
            raise ExprParseError(f"expected {text!r}, found {found}", token.offset)
        return self.advance()

    def parse(self) -> ExprNode:
        if self.peek().kind == "end":
            raise ExprParseError("empty expression", self.peek().offset)
        node = self.expression(0)
        token = self.peek()
        if token.kind != "end":
            raise ExprParseError(f"unexpected {token.text!r}", token.offset)
        return node

    # Precedence climbing: loop over operators binding at least as tightly as min_prec
    def expression(self, min_prec: int) -> ExprNode:
        lhs = self.unary()
        while True:
            token = self.peek()
            if token.kind != "op" or token.text not in _BINARY:
                return lhs
            prec, assoc = _BINARY[token.text]
            if prec < min_prec:
                return lhs
            self.advance()
            rhs = self.expression(prec + 1 if assoc == "left" else prec)
            lhs = BinOp(token.text, lhs, rhs)

    def unary(self) -> ExprNode:
        token = self.peek()
        if token.kind == "op" and token.text == "-":
            self.advance()
            return Neg(self.expression(_UNARY_PREC))
        return self.atom()

    def atom(self) -> ExprNode:
        token = self.advance()
        if token.kind == "num":
            value = float(token.text)
            if not math.isfinite(value):
                raise ExprParseError(f"literal {token.text!r} is not finite", token.offset)
            return Const(value)
        if token.kind == "name":
            following = self.peek()
            if following.kind == "op" and following.text == "(":
                if token.text not in FUNCTIONS:
                    raise ExprParseError(f"unknown function {token.text!r}", token.offset)
                self.advance()
                arg = self.expression(0)
                self.expect(")")
                return Call(token.text, arg)
            if token.text in FUNCTIONS:
                raise ExprParseError(f"function {token.text!r} needs an argument", token.offset)
            return Name(token.text)
        if token.kind == "op" and token.text == "(":
            node = self.expression(0)
            self.expect(")")
            return node
        if token.kind == "end":
            raise ExprParseError("unexpected end of input", token.offset)
        raise ExprParseError(f"unexpected operator {token.text!r}", token.offset)


def parse_expr(source: str) -> ExprNode:
    """Parse expression text into an immutable tree.

    Raises:
        ExprParseError: with the byte offset of the offending token.
    """
    return _Parser(source).parse()


def to_source(node: ExprNode) -> str:
    """Fully parenthesized text that parses back to an equal tree."""
    match node:
        case Const(value):
            return repr(value)
        case Name(name):
            return name
        case Neg(operand):
            return f"(-{to_source(operand)})"
        case BinOp(op, left, right):
            return f"({to_source(left)} {op} {to_source(right)})"
        case Call(func, arg):
            return f"{func}({to_source(arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def names(node: ExprNode) -> FrozenSet[str]:
    """All free names of the tree."""
    match node:
        case Const():
            return frozenset()
        case Name(name):
            return frozenset({name})
        case Neg(operand) | Call(_, operand):
            return names(operand)
        case BinOp(_, left, right):
            return names(left) | names(right)
    raise TypeError(f"not an expression node: {node!r}")


def parameters(node: ExprNode) -> FrozenSet[str]:
    """Free names that are not Lagrangian slots."""
    return frozenset(n for n in names(node) if n not in VARIABLES)


@dataclass(frozen=True)
class EvalEnv:
    """Bindings for x, y, z, t, u (scalars or equally shaped arrays) and parameters."""

    x: Value = 0.0
    y: Value = 0.0
    z: Value = 0.0
    t: Value = 0.0
    u: Value = 0.0
    parameters: Mapping[str, float] = field(default_factory=dict)

    def lookup(self, name: str) -> Value:
        if name in VARIABLES:
            return getattr(self, name)
        try:
            return self.parameters[name]
        except KeyError:
            raise EvaluationError(f"unbound name {name!r}") from None

    def replace(self, **changes: Value) -> "EvalEnv":
        values = {v: getattr(self, v) for v in VARIABLES}
        values.update(changes)
        return EvalEnv(parameters=self.parameters, **values)


def _power(base: npt.NDArray[np.float64], exponent: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    fractional = exponent != np.round(exponent)
    if np.any((base < 0.0) & fractional):
        raise EvaluationError("negative base with fractional exponent")
    if np.any((base == 0.0) & (exponent < 0.0)):
        raise EvaluationError("division by zero: zero raised to a negative power")
    return np.power(base, exponent)


def _evaluate(node: ExprNode, env: EvalEnv) -> npt.NDArray[np.float64]:
    match node:
        case Const(value):
            return np.asarray(value, dtype=float)
        case Name(name):
            return np.asarray(env.lookup(name), dtype=float)
        case Neg(operand):
            return -_evaluate(operand, env)
        case Call(func, arg):
            return FUNCTIONS[func](_evaluate(arg, env))
        case BinOp(op, left, right):
            lhs = _evaluate(left, env)
            rhs = _evaluate(right, env)
            if op == "+":
                return lhs + rhs
            if op == "-":
                return lhs - rhs
            if op == "*":
                return lhs * rhs
            if op == "/":
                if np.any(rhs == 0.0):
                    raise EvaluationError("division by zero")
                return lhs / rhs
            return _power(lhs, rhs)
    raise TypeError(f"not an expression node: {node!r}")


def eval_expr(node: ExprNode, env: EvalEnv) -> Value:
    """Evaluate the tree; returns a float for scalar bindings, else an array.

    Raises:
        EvaluationError: unbound name, division by zero, negative base with a
            fractional exponent, or a non-finite result.
    """
    with np.errstate(all="ignore"):
        result = _evaluate(node, env)
    if not np.all(np.isfinite(result)):
        raise EvaluationError("expression evaluated to a non-finite value")
    if result.ndim == 0:
        return float(result)
    return result


def partial(node: ExprNode, var: str, env: EvalEnv) -> Value:
    """Central finite-difference partial derivative with respect to y, z, t or u."""
    if var not in VARIABLES[1:]:
        raise ValueError(f"partial derivatives are taken in y, z, t or u, got {var!r}")
    point = np.asarray(getattr(env, var), dtype=float)
    step = 1e-6 * np.maximum(1.0, np.abs(point))
    upper = eval_expr(node, env.replace(**{var: point + step}))
    lower = eval_expr(node, env.replace(**{var: point - step}))
    result = (np.asarray(upper) - np.asarray(lower)) / (2.0 * step)
    if np.ndim(result) == 0:
        return float(result)
    return result
