import math

import numpy as np
import pytest

from fracvar.core.calculus import GridFunction, sample
from fracvar.core.config import reset_settings
from fracvar.core.errors import DomainError, EvaluationError, GridError
from fracvar.core.variational.functional import (
    BasisCandidate,
    GridCandidate,
    convexity_certificate,
    corollary_residuals,
    el_residual,
    evaluate,
    interior_max,
    natural_bc_residuals,
    verify,
)
from fracvar.core.variational.problem import builtin, from_expression
from fracvar.core.variational.solver import closed_form_ex7
from fracvar.models import Classification, EndpointCondition, FractionalOrder, Interval

EX7_COEFFS = (0.3055077, 0.3889846)


@pytest.fixture
def ex6():
    return builtin("ex6", {}, alpha=0.5)


@pytest.fixture
def ex7():
    return builtin("ex7", {"g": 1.0, "l": 1.0}, alpha=0.5)


def basis(problem, coefficients):
    return BasisCandidate(tuple(coefficients), problem.interval, problem.order)


class TestEvaluate:
    def test_ex6_candidate(self, ex6):
        assert evaluate(ex6, basis(ex6, (1.0, 1.0))) == pytest.approx(math.pi / 6, abs=1e-3)

    def test_ex7_solution(self, ex7):
        assert evaluate(ex7, basis(ex7, EX7_COEFFS)) == pytest.approx(0.3055077, abs=1e-4)

    def test_zero_lagrangian(self, unit):
        problem = from_expression("0", unit, 0.5)
        y = GridCandidate(sample(np.sin, unit, 100))
        assert evaluate(problem, y) == 0.0

    def test_scaling(self, unit):
        single = from_expression("z^2 + exp(y) * x", unit, 0.5)
        double = from_expression("2 * (z^2 + exp(y) * x)", unit, 0.5)
        y = basis(single, (0.2, -0.7, 1.3))
        assert evaluate(double, y) == pytest.approx(2.0 * evaluate(single, y), rel=1e-12)

    def test_failure_reports_position(self, unit):
        problem = from_expression("1/(x - 0.5)", unit, 0.5)
        with pytest.raises(EvaluationError) as info:
            evaluate(problem, basis(problem, (0.0, 1.0)), n=100)
        assert info.value.x == pytest.approx(0.5)

    def test_candidate_on_wrong_interval(self, ex7):
        y = GridCandidate(sample(np.sin, Interval(a=0.0, b=2.0), 100))
        with pytest.raises(GridError):
            evaluate(ex7, y)

    @pytest.mark.parametrize("n", [-3, 0, 2])
    def test_explicit_coarse_grid_is_rejected(self, ex7, n):
        with pytest.raises(GridError):
            evaluate(ex7, basis(ex7, EX7_COEFFS), n=n)

    @pytest.mark.parametrize("coefficients", [(), (float("nan"), 1.0), (0.0, float("inf"))])
    def test_basis_candidate_rejects_bad_coefficients(self, ex7, coefficients):
        with pytest.raises(DomainError):
            BasisCandidate(coefficients, ex7.interval, ex7.order)

    def test_basis_candidate_with_wrong_order(self, ex7):
        y = BasisCandidate((0.0, 1.0), ex7.interval, FractionalOrder(alpha=0.7))
        with pytest.raises(GridError):
            evaluate(ex7, y)


class TestEulerLagrange:
    def test_ex6_candidate(self, ex6):
        residual = el_residual(ex6, basis(ex6, (1.0, 1.0)))
        assert np.max(np.abs(residual.values)) < 1e-6

    @pytest.mark.parametrize("coefficients", [EX7_COEFFS, (0.0, 0.0), (1.5, -2.0)])
    def test_ex7_whole_family(self, ex7, coefficients):
        assert interior_max(el_residual(ex7, basis(ex7, coefficients))) < 1e-3

    def test_constant_candidate(self, unit):
        problem = from_expression("z^2", unit, 0.5)
        y = GridCandidate(sample(lambda t: np.full_like(t, 2.0), unit, 200))
        assert np.max(np.abs(el_residual(problem, y).values)) <= 1e-10


class TestNaturalBoundary:
    def test_ex7_solution(self, ex7):
        at_a, at_b = natural_bc_residuals(ex7, basis(ex7, EX7_COEFFS))
        assert at_a == pytest.approx(0.0, abs=1e-4)
        assert at_b == pytest.approx(0.0, abs=1e-4)

    def test_ex7_closed_form_is_tight(self, ex7):
        at_a, at_b = natural_bc_residuals(ex7, basis(ex7, closed_form_ex7(1.0, 1.0, 0.5)))
        assert abs(at_a) < 1e-10 and abs(at_b) < 1e-10

    def test_ex6_candidate(self, ex6):
        at_a, at_b = natural_bc_residuals(ex6, basis(ex6, (1.0, 1.0)))
        assert abs(at_a) < 1e-6 and abs(at_b) < 1e-6

    def test_fixed_ends_not_applicable(self, unit):
        problem = from_expression(
            "z^2 + t", unit, 0.5, EndpointCondition.fixed(0.0), EndpointCondition.fixed(1.0)
        )
        for coefficients in [(0.0, 1.0), (3.0, -2.0)]:
            assert natural_bc_residuals(problem, basis(problem, coefficients)) == (None, None)

    def test_ex7_at_zero(self, ex7):
        at_a, at_b = natural_bc_residuals(ex7, basis(ex7, (0.0, 0.0)))
        assert at_a == pytest.approx(0.0, abs=1e-12)
        assert at_b == pytest.approx(-2.0, abs=1e-9)

    def test_corollary_form(self, unit, half):
        problem = from_expression("z^2", unit, half, EndpointCondition.fixed(0.0))
        y = basis(problem, (0.0, 1.0))
        at_a, at_b = natural_bc_residuals(problem, y)
        assert at_a is None
        z_b = float(y.derivative(np.array(1.0)))
        assert at_b == pytest.approx(math.gamma(1.5) * 2.0 * z_b, abs=1e-6)
        _, d3_b = corollary_residuals(problem, y)
        assert d3_b == pytest.approx(2.0 * z_b, abs=1e-6)

    def test_corollary_needs_endpoint_free_lagrangian(self, ex7):
        with pytest.raises(ValueError):
            corollary_residuals(ex7, basis(ex7, EX7_COEFFS))


class TestConvexity:
    def test_ex7_is_certified(self, ex7):
        outcome = convexity_certificate(ex7, 10_000, 2.0, seed=0)
        assert outcome.certified
        assert outcome.samples == 10_000
        assert outcome.slack == 0.0
        assert outcome.box == ((-2.0, 2.0),) * 4

    def test_ex6_has_counterexample(self, ex6):
        outcome = convexity_certificate(ex6, 10_000, 2.0, seed=0)
        assert outcome.status == "counterexample"
        ce = outcome.counterexample
        assert ce.increment < ce.linear_part

    def test_expression_quadratic(self, unit):
        outcome = convexity_certificate(from_expression("z^2", unit, 0.5), 2_000, seed=3)
        assert outcome.certified
        assert outcome.slack == 1e-7

    def test_deterministic(self, ex6):
        first = convexity_certificate(ex6, 5_000, seed=11)
        second = convexity_certificate(ex6, 5_000, seed=11)
        assert first == second

    def test_max_problem_checks_concavity(self, unit):
        problem = from_expression("-(z^2) - t^2", unit, 0.5, sense="max")
        assert convexity_certificate(problem, 2_000, seed=1).certified
        convex = from_expression("z^2", unit, 0.5, sense="max")
        assert convexity_certificate(convex, 2_000, seed=1).status == "counterexample"

    def test_settings_defaults(self, ex7, monkeypatch):
        monkeypatch.setenv("FRACVAR_CONVEXITY_SAMPLES", "123")
        reset_settings()
        assert convexity_certificate(ex7).samples == 123


class TestVerify:
    def test_ex7_solution_certified(self, ex7):
        report = verify(ex7, basis(ex7, EX7_COEFFS))
        assert report.classification == Classification.STATIONARY_CERTIFIED
        assert report.tolerance == 1e-6
        assert report.objective == pytest.approx(0.3055077, abs=1e-4)

    def test_ex7_zero_is_non_stationary(self, ex7):
        report = verify(ex7, basis(ex7, (0.0, 0.0)))
        assert report.classification == Classification.NON_STATIONARY

    def test_ex6_candidate_stationary(self, ex6):
        report = verify(ex6, basis(ex6, (1.0, 1.0)))
        assert report.classification == Classification.STATIONARY
        assert report.convexity.status == "counterexample"

    def test_grid_candidate_with_derivative(self, ex7):
        y = basis(ex7, closed_form_ex7(1.0, 1.0, 0.5))
        x = np.linspace(0.0, 1.0, 1001)
        candidate = GridCandidate(
            GridFunction(ex7.interval, y.values(x)), GridFunction(ex7.interval, y.derivative(x))
        )
        report = verify(ex7, candidate)
        assert report.tolerance == 1e-3
        assert report.classification == Classification.STATIONARY_CERTIFIED

    def test_grid_candidate_derivative_must_share_grid(self, ex7):
        values = sample(np.sin, ex7.interval, 100)
        with pytest.raises(GridError):
            GridCandidate(values, sample(np.cos, ex7.interval, 50))
