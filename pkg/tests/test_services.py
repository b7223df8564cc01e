import numpy as np
import pytest

from conftest import EX7_CONFIG
from fracvar.core.errors import ConfigError, GridError, ProblemError
from fracvar.core.variational.functional import BasisCandidate, verify
from fracvar.core.variational.problem import ExpressionLagrangian, builtin
from fracvar.models import Classification, FractionalOrder, SolveOptions
from fracvar.services import csv_io, diagnostics
from fracvar.services.problem_config import load_problem, parse_config
from fracvar.services.solve_service import ex7_reference, run_sweep, sweep_orders


class TestProblemConfig:
    def test_builtin(self):
        problem = parse_config(EX7_CONFIG).to_problem()
        assert problem.name == "ex7"
        assert problem.order.alpha == 0.5
        assert problem.at_a.is_free and problem.at_b.is_free

    def test_expression_with_comments_and_quotes(self):
        text = 'alpha=0.5\na=0\nb=2  # end\nlagrangian="z^2 + g*t^2"   # comment\nparam.g=3\ny_a=0.25\nsense=max\n'
        problem = parse_config(text).to_problem()
        assert isinstance(problem.lagrangian, ExpressionLagrangian)
        assert problem.lagrangian.source == "z^2 + g*t^2"
        assert problem.lagrangian.params == {"g": 3.0}
        assert problem.interval.b == 2.0
        assert problem.at_a.value == 0.25
        assert problem.at_b.is_free
        assert problem.sense == "max"

    def test_single_quotes_and_blank_lines(self):
        text = "\n# header\n\nalpha = 0.25\na=0\nb=1\nlagrangian='z^2 + (u-1)^2'\n"
        config = parse_config(text)
        assert config.alpha == 0.25
        assert config.lagrangian == "z^2 + (u-1)^2"

    def test_fixed_endpoints_on_builtin(self):
        problem = parse_config(EX7_CONFIG.replace("y_b=free", "y_b=1")).to_problem()
        assert problem.at_b.value == 1.0

    @pytest.mark.parametrize(
        "text, message",
        [
            ('a=0\nb=1\nlagrangian="z^2"\n', "missing required key: alpha"),
            ('alpha=0.5\na=0\nlagrangian="z^2"\n', "missing required key: b"),
            ('alpha=0.5\na=0\nb=1\nlagrangian="z^2"\nfoo=1\n', "unknown key: foo"),
            ('alpha=0.5\nalpha=0.6\na=0\nb=1\nlagrangian="z^2"\n', "duplicate key"),
            ('alpha=half\na=0\nb=1\nlagrangian="z^2"\n', "invalid value for alpha"),
            ('alpha=0.5\na=0\nb=1\nlagrangian="z^2"\nparam.g=x\n', "invalid value for param.g"),
            ("alpha=0.5\njust text\n", "line 2: expected key=value"),
            ("alpha=0.5\nlagrangian\n", "line 2: expected key=value"),
            ('alpha=0.5\nparam.g=1\nparam.g=2\nlagrangian="z^2"\n', "line 3: duplicate parameter"),
            (EX7_CONFIG + "b=2\n", "contradicts"),
        ],
    )
    def test_rejects(self, text, message):
        with pytest.raises(ConfigError, match=message):
            parse_config(text).to_problem()

    def test_problem_errors_pass_through(self):
        with pytest.raises(ProblemError):
            parse_config("alpha=0.5\nlagrangian=builtin:nope\n").to_problem()
        with pytest.raises(ProblemError):
            parse_config("alpha=1.5\nlagrangian=builtin:ex6\n").to_problem()

    def test_load_problem(self, write_config):
        assert load_problem(write_config(EX7_CONFIG)).lagrangian.params == {"g": 1.0, "l": 1.0}


class TestCsv:
    @pytest.fixture
    def ex7(self):
        return builtin("ex7", {"g": 1.0, "l": 1.0})

    def test_trajectory_round_trip(self, ex7, tmp_path):
        y = BasisCandidate((0.3, 0.4), ex7.interval, ex7.order)
        path = tmp_path / "y.csv"
        csv_io.write_trajectory(path, y, 100)
        candidate = csv_io.read_candidate(path, ex7)
        x = np.linspace(0.0, 1.0, 101)
        np.testing.assert_array_equal(candidate.values.values, y.values(x))
        np.testing.assert_array_equal(candidate.derivative.values, y.derivative(x))

    def test_without_derivative_column(self, ex7, tmp_path):
        path = tmp_path / "y.csv"
        path.write_text("x,y\n" + "".join(f"{i / 8!r},{i / 8!r}\n" for i in range(9)))
        candidate = csv_io.read_candidate(path, ex7)
        assert candidate.derivative is None
        assert candidate.values.n == 8

    @pytest.mark.parametrize(
        "text, error",
        [
            ("x,w\n0,1\n", ConfigError),
            ("x,y\n0,1\n0.25,a\n0.5,0\n0.75,0\n1,0\n", ConfigError),
            ("x,y\n0,0\n0.5,0\n1,0\n", GridError),
        ],
    )
    def test_malformed(self, ex7, tmp_path, text, error):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(error):
            csv_io.read_candidate(path, ex7)

    def test_report_rows(self, ex7, tmp_path):
        report = verify(ex7, BasisCandidate((0.0, 0.0), ex7.interval, ex7.order), sample_count=100)
        path = tmp_path / "reports.csv"
        csv_io.append_report(path, report)
        csv_io.append_report(path, report)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(csv_io.REPORT_HEADER)
        assert len(lines) == 3
        assert lines[1].split(",")[4] == "non-stationary"


class TestSolveService:
    @pytest.mark.parametrize("args", [(0.0, 0.5, 3), (0.6, 0.4, 3), (0.5, 1.1, 3), (0.2, 0.4, 0)])
    def test_sweep_range_errors(self, args):
        with pytest.raises(ConfigError):
            sweep_orders(*args)

    def test_sweep_grid_is_inclusive(self):
        assert sweep_orders(0.5, 0.5, 1) == [0.5]
        assert sweep_orders(0.2, 1.0, 5) == pytest.approx([0.2, 0.4, 0.6, 0.8, 1.0])

    def test_sweep_keeps_order(self):
        problem = builtin("ex7", {"g": 1.0, "l": 1.0})
        alphas = [0.9, 0.3, 0.6]
        results = run_sweep(problem, alphas, SolveOptions(grid=200), workers=3)
        assert [alpha for alpha, _ in results] == alphas
        for alpha, report in results:
            assert report.converged
            np.testing.assert_allclose(report.coefficients, ex7_reference(problem.with_order(alpha)), atol=1e-5)

    def test_sweep_needs_a_worker(self):
        problem = builtin("ex7", {"g": 1.0, "l": 1.0})
        with pytest.raises(ConfigError, match="workers"):
            run_sweep(problem, [0.5], SolveOptions(grid=200), workers=0)

    def test_reference_only_for_free_ex7(self):
        assert ex7_reference(builtin("ex6", {})) is None
        problem = parse_config(EX7_CONFIG.replace("y_a=free", "y_a=0")).to_problem()
        assert ex7_reference(problem) is None


class TestDiagnostics:
    def test_rows_at_half(self):
        rows = dict(diagnostics.diagnose(FractionalOrder(alpha=0.5), 2000))
        assert rows["constant_rule_max_error"] == 0.0
        assert rows["integral_normalization_rel_error"] < 1e-4
        for gamma_exp in ("0.5", "1", "2"):
            assert rows[f"monomial_rel_error[gamma={gamma_exp}]"] < 1e-2
            assert abs(rows[f"fundamental_identity[gamma={gamma_exp}]"]) < 1e-3
        assert rows["ibp_defect(t^alpha,t^alpha)"] == pytest.approx(0.5059, abs=1e-3)
        assert rows["product_rule_defect(t,t)@t=1"] == pytest.approx(-0.7523, abs=1e-2)

    def test_defects_vanish_classically(self):
        rows = dict(diagnostics.diagnose(FractionalOrder(alpha=1.0), 2000))
        assert abs(rows["ibp_defect(t^alpha,t^alpha)"]) < 1e-8
        assert abs(rows["product_rule_defect(t,t)@t=1"]) < 1e-8

    def test_table_layout(self):
        order = FractionalOrder(alpha=0.5)
        table = diagnostics.format_table(order, 100, [("row", 0.25)])
        assert table.splitlines() == [f"{'alpha':<36}0.5", f"{'grid':<36}100", f"{'row':<36}+0.2500000000"]
