"""半整数幂级数测试"""
import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy as sp

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from constants import B_CANONICAL
from exceptions import DomainError, PreconditionError, SeriesError
from series import (
    B_SYMBOL, HalfPower, SeriesSolution, TfSeries, eval_series, eval_series_derivative,
    iterate_tf, iterate_to_convergence, reference_series, series_add, series_derivative,
    series_divide_sqrt_x, series_equal, series_integrate_twice, series_pow_three_halves,
    series_truncate, substitute_b, symbolic_series,
)

B = B_SYMBOL


def sym(mapping, truncation):
    return TfSeries.from_mapping(mapping, truncation)


class TestHalfPower:
    """指数表示测试"""

    def test_parse_forms(self):
        assert HalfPower.parse("9/2") == HalfPower(9)
        assert HalfPower.parse("4") == HalfPower(8)
        assert HalfPower.parse("4.5") == HalfPower(9)

    def test_parse_rejects_non_half_integer(self):
        with pytest.raises(SeriesError):
            HalfPower.parse("1/3")
        with pytest.raises(SeriesError):
            HalfPower.parse("abc")

    def test_str_and_exponent(self):
        assert str(HalfPower(9)) == "9/2"
        assert str(HalfPower(6)) == "3"
        assert HalfPower(3).exponent == Fraction(3, 2)
        assert HalfPower(3).is_half_integer

    def test_integer_required(self):
        with pytest.raises(SeriesError):
            HalfPower(1.5)


class TestTfSeries:
    """级数容器不变量测试"""

    def test_zero_coefficients_dropped(self):
        s = sym({0: 1, 2: 0, 3: Fraction(4, 3)}, 4)
        assert [p.twice_power for p, _ in s.terms] == [0, 3]

    def test_terms_above_truncation_dropped(self):
        s = sym({0: 1, 9: 5}, 4)
        assert s.as_dict() == {0: Fraction(1)}

    def test_unsorted_terms_rejected(self):
        with pytest.raises(SeriesError):
            TfSeries(((HalfPower(3), 1.0), (HalfPower(2), 1.0)), 4)

    def test_to_json(self):
        s = sym({0: 1, 2: -B}, 4)
        data = json.loads(s.to_json())
        assert data["truncation_twice_power"] == 4
        assert data["terms"][1] == {"twice_power": 2, "coefficient": "-B"}


class TestSeriesArithmetic:
    """级数运算测试"""

    def test_add_cancellation(self):
        a = sym({0: 1, 2: -B}, 6)
        b = sym({2: B}, 6)
        assert series_add(a, b).as_dict() == {0: 1}

    def test_add_zero_identity(self):
        a = sym({0: 1, 3: Fraction(4, 3)}, 6)
        assert series_equal(series_add(a, TfSeries.zero(6)), a)

    def test_add_takes_smaller_truncation(self):
        assert series_add(TfSeries.constant(1, 4), sym({3: 1}, 6)).truncation_twice_power == 4

    def test_pow_three_halves_first_order(self):
        s = sym({0: 1, 2: -B, 3: Fraction(4, 3)}, 2)
        result = series_pow_three_halves(s)
        assert series_equal(result, sym({0: 1, 2: -Fraction(3, 2) * B}, 2))

    def test_pow_three_halves_to_three_halves(self):
        s = sym({0: 1, 2: -B, 3: Fraction(4, 3)}, 3)
        result = series_pow_three_halves(s)
        assert series_equal(result, sym({0: 1, 2: -sp.Rational(3, 2) * B, 3: 2}, 3))

    def test_pow_three_halves_of_one(self):
        assert series_pow_three_halves(TfSeries.constant(1, 9)).as_dict() == {0: 1}

    def test_pow_three_halves_requires_unit_constant(self):
        with pytest.raises(PreconditionError):
            series_pow_three_halves(sym({0: 2, 2: 1.0}, 4))

    def test_pow_three_halves_binomial(self):
        # (1 + x)^(3/2) = 1 + 3/2 x + 3/8 x^2 - 1/16 x^3
        result = series_pow_three_halves(sym({0: 1, 2: 1}, 6))
        assert result.as_dict() == {0: 1, 2: Fraction(3, 2), 4: Fraction(3, 8), 6: Fraction(-1, 16)}

    def test_divide_sqrt_x(self):
        assert series_divide_sqrt_x(TfSeries.constant(1, 4)).as_dict() == {-1: 1}
        shifted = series_divide_sqrt_x(sym({0: 1, 2: -Fraction(3, 2) * B}, 2))
        assert series_equal(shifted, sym({-1: 1, 1: -sp.Rational(3, 2) * B}, 1))
        assert series_divide_sqrt_x(sym({3: 1}, 4)).as_dict() == {2: 1}

    def test_divide_sqrt_x_rejects_non_integrable(self):
        with pytest.raises(SeriesError):
            series_divide_sqrt_x(sym({-1: 1}, 2))

    def test_integrate_twice_first_iterate(self):
        result = series_integrate_twice(sym({-1: 1}, -1), 1, -B)
        assert series_equal(result, sym({0: 1, 2: -B, 3: Fraction(4, 3)}, 3))

    def test_integrate_twice_of_zero(self):
        assert series_integrate_twice(TfSeries.zero(0), 1, 0).as_dict() == {0: 1}

    def test_integrate_twice_second_iterate(self):
        rhs = sym({-1: 1, 1: -sp.Rational(3, 2) * B}, 1)
        result = series_integrate_twice(rhs, 1, -B)
        expected = sym({0: 1, 2: -B, 3: Fraction(4, 3), 5: -sp.Rational(2, 5) * B}, 5)
        assert series_equal(result, expected)

    def test_second_derivative_undoes_integration(self):
        rhs = sym({-1: 1, 1: -sp.Rational(3, 2) * B, 2: 2}, 2)
        twice = series_derivative(series_derivative(series_integrate_twice(rhs, 1, -B)))
        assert series_equal(twice, rhs)

    def test_truncate(self):
        s = reference_series(B)
        assert series_truncate(s, HalfPower(3)).as_dict().keys() == {0, 2, 3}
        assert series_truncate(s, 3).truncation_twice_power == 3


class TestIteration:
    """迭代构造测试"""

    def test_first_iterate(self):
        y1 = iterate_tf(TfSeries.constant(1, 9), B, HalfPower(9))
        assert series_equal(y1, sym({0: 1, 2: -B, 3: Fraction(4, 3)}, 9))

    def test_second_iterate_leading_terms(self):
        y1 = iterate_tf(TfSeries.constant(1, 9), B, 9)
        y2 = iterate_tf(y1, B, 9)
        assert sp.expand(y2.coefficient(5) + sp.Rational(2, 5) * B) == 0
        assert y2.coefficient(6) == Fraction(1, 3)

    def test_symbolic_convergence_matches_reference(self):
        series, iterations = symbolic_series(HalfPower(9))
        assert series_equal(series, reference_series(B))
        assert iterations <= 9

    def test_symbolic_single_iteration(self):
        series, iterations = symbolic_series(HalfPower(9), iterations=1)
        assert iterations == 1
        assert series_equal(series, sym({0: 1, 2: -B, 3: Fraction(4, 3)}, 9))

    def test_numeric_iteration_matches_symbolic(self):
        numeric, _ = iterate_to_convergence(B_CANONICAL, 16)
        exact = substitute_b(symbolic_series(16)[0], B_CANONICAL)
        for p, c in exact.terms:
            assert float(numeric.coefficient(p)) == pytest.approx(float(c), rel=1e-10)

    def test_higher_order_coefficients(self):
        numeric, _ = iterate_to_convergence(B_CANONICAL, 11)
        assert float(numeric.coefficient(10)) == pytest.approx(B_CANONICAL ** 2 / 175, rel=1e-12)
        assert float(numeric.coefficient(11)) == pytest.approx(-0.0271286, abs=1e-6)

    def test_iteration_limit_returns_partial(self):
        series, iterations = iterate_to_convergence(B_CANONICAL, 9, max_iterations=1)
        assert iterations == 1
        assert set(series.as_dict()) == {0, 2, 3}


class TestReferenceSeries:
    """已知小x展开测试"""

    def setup_method(self):
        """测试前设置"""
        self.series = reference_series(B_CANONICAL)

    def test_coefficients(self):
        assert self.series.coefficient(6) == Fraction(1, 3)
        assert self.series.coefficient(4) == 0
        assert float(self.series.coefficient(9)) == pytest.approx(2 / 27 + B_CANONICAL ** 3 / 252, rel=1e-14)
        assert float(self.series.coefficient(9)) == pytest.approx(0.0899672, abs=1e-7)

    def test_boundary_values(self):
        assert eval_series(self.series, 0.0) == 1.0
        assert eval_series_derivative(self.series, 0.0) == pytest.approx(-B_CANONICAL)

    def test_value_at_small_x(self):
        assert eval_series(self.series, 0.01) == pytest.approx(0.98544661, abs=1e-8)

    def test_residual_shrinks_towards_origin(self):
        d2 = series_derivative(series_derivative(self.series))

        def residual(x):
            y = eval_series(self.series, x)
            return abs(eval_series(d2, x) - y ** 1.5 / x ** 0.5)

        assert residual(1e-2) / residual(1e-3) >= 50

    def test_rejects_negative_b(self):
        with pytest.raises(DomainError):
            reference_series(-1.0)

    def test_negative_x_rejected(self):
        with pytest.raises(DomainError):
            eval_series(self.series, -0.1)

    def test_divergent_derivative_at_origin(self):
        with pytest.raises(DomainError):
            eval_series_derivative(sym({1: 1}, 2), 0.0)


class TestSeriesSolution:
    """级数解适配器测试"""

    def test_evaluates_numeric_series(self):
        solution = SeriesSolution(reference_series(B_CANONICAL))
        assert solution.value(0.0) == 1.0
        assert solution.derivative(0.0) == pytest.approx(-B_CANONICAL)

    def test_symbolic_series_refused(self):
        with pytest.raises(SeriesError):
            SeriesSolution(reference_series(B))
