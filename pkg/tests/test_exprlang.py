import numpy as np
import pytest

from fracvar.core.errors import EvaluationError, ExprParseError
from fracvar.core.expr import EvalEnv, eval_expr, parse_expr, partial, to_source
from fracvar.core.calculus.specfun import alpha_factorial
from fracvar.core.expr.exprlang import BinOp, Const, Name, Neg, parameters
from fracvar.core.variational.solver import closed_form_ex7

EX7_SOURCE = "z^2 + g*t^2 + l*(u-1)^2"


def test_parameters_are_non_slot_names():
    node = parse_expr(EX7_SOURCE)
    assert parameters(node) == {"g", "l"}


def test_constant():
    assert parse_expr("0") == Const(0.0)


@pytest.mark.parametrize(
    "source, offset",
    [
        ("((x", 3),
        ("", 0),
        ("x +", 3),
        ("foo(x)", 0),
        ("x $ y", 2),
        ("sqrt", 0),
        ("x)", 1),
    ],
)
def test_parse_errors_report_offset(source, offset):
    with pytest.raises(ExprParseError) as info:
        parse_expr(source)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_power_is_right_associative():
    assert parse_expr("2^3^2") == BinOp("^", Const(2.0), BinOp("^", Const(3.0), Const(2.0)))
    assert eval_expr(parse_expr("2^3^2"), EvalEnv()) == 512.0


def test_precedence():
    assert parse_expr("-x^2") == Neg(BinOp("^", Name("x"), Const(2.0)))
    assert parse_expr("a - b - c") == BinOp("-", BinOp("-", Name("a"), Name("b")), Name("c"))
    assert eval_expr(parse_expr("1 + 2 * 3"), EvalEnv()) == 7.0
    assert eval_expr(parse_expr("2^-1"), EvalEnv()) == 0.5
    assert eval_expr(parse_expr("-2^2"), EvalEnv()) == -4.0


@pytest.mark.parametrize(
    "source",
    [EX7_SOURCE, "-x^2", "gamma(1.5) / sqrt(abs(y - 3))", "exp(-t) * ln(2 + u^2)", "1e-05 * z", "((x))"],
)
def test_round_trip(source):
    node = parse_expr(source)
    assert parse_expr(to_source(node)) == node


def test_ex7_integrand_value():
    # at the minimizer c_0 + c_1 x^(1/2) the integrand is constant and equals c_0
    c0, c1 = closed_form_ex7(1.0, 1.0, 0.5)
    env = EvalEnv(z=c1 * alpha_factorial(0.5), t=c0, u=c0 + c1, parameters={"g": 1.0, "l": 1.0})
    value = eval_expr(parse_expr(EX7_SOURCE), env)
    assert value == pytest.approx(c0, rel=1e-12)
    assert value == pytest.approx(0.3055077, abs=1e-7)


def test_variable_and_functions():
    assert eval_expr(parse_expr("x"), EvalEnv(x=7.0)) == 7.0
    assert eval_expr(parse_expr("gamma(1.5)"), EvalEnv()) == pytest.approx(0.8862269255, abs=1e-10)


def test_vectorized():
    x = np.linspace(0.0, 1.0, 5)
    np.testing.assert_allclose(eval_expr(parse_expr("x^2 + 1"), EvalEnv(x=x)), x**2 + 1.0)


@pytest.mark.parametrize(
    "source, env",
    [
        ("q", EvalEnv()),
        ("1/(y-y)", EvalEnv(y=2.0)),
        ("y^0.5", EvalEnv(y=-1.0)),
        ("0^-1", EvalEnv()),
        ("ln(x)", EvalEnv(x=0.0)),
        ("sqrt(x)", EvalEnv(x=-4.0)),
        ("gamma(x)", EvalEnv(x=0.0)),
        ("exp(x)", EvalEnv(x=1000.0)),
    ],
)
def test_evaluation_errors(source, env):
    with pytest.raises(EvaluationError):
        eval_expr(parse_expr(source), env)


def test_negative_base_with_integer_exponent():
    assert eval_expr(parse_expr("y^3"), EvalEnv(y=-2.0)) == -8.0


class TestPartial:
    def test_square(self):
        assert partial(parse_expr("z^2"), "z", EvalEnv(z=3.0)) == pytest.approx(6.0, abs=1e-4)

    def test_endpoint_slot(self):
        node = parse_expr("z^2 + t^2 + (u-1)^2")
        assert partial(node, "t", EvalEnv(t=0.305508)) == pytest.approx(0.611016, abs=1e-4)

    def test_absent_variable(self):
        assert partial(parse_expr("z^2"), "y", EvalEnv(y=0.3, z=1.2)) == pytest.approx(0.0, abs=1e-6)

    def test_constant_expression(self):
        assert abs(partial(parse_expr("gamma(2.5) * 3"), "u", EvalEnv(u=-1.7))) <= 1e-10

    def test_relative_accuracy(self):
        node = parse_expr("exp(y) * z^3")
        env = EvalEnv(y=0.4, z=1.7)
        assert partial(node, "y", env) == pytest.approx(np.exp(0.4) * 1.7**3, rel=1e-5)
        assert partial(node, "z", env) == pytest.approx(np.exp(0.4) * 3 * 1.7**2, rel=1e-5)

    def test_x_is_not_differentiable(self):
        with pytest.raises(ValueError):
            partial(parse_expr("x"), "x", EvalEnv())
