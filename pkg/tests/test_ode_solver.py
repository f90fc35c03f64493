"""RK4积分与打靶测试"""
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from config import IntegratorConfig
from constants import B_CANONICAL, SINGULAR_COEFFICIENT
from exceptions import BracketError, DomainError, PreconditionError
from ode_solver import (
    BoundedSoFar, BoundedSolution, Crossing, TfIntegrator, Unbounded,
    bounded_solution, classify, integrate,
)
from series import HalfPower


@pytest.fixture(scope="module")
def canonical():
    """标准斜率的轨迹"""
    return integrate(-B_CANONICAL)


@pytest.fixture(scope="module")
def solution():
    return bounded_solution()


@pytest.fixture(scope="module")
def shot():
    return TfIntegrator().shoot()


class TestClassification:
    """轨迹分类测试"""

    def setup_method(self):
        """测试前设置"""
        self.integrator = TfIntegrator()

    def test_canonical_slope_is_bounded(self, canonical):
        assert isinstance(canonical.status, BoundedSoFar)
        assert canonical.x_end == pytest.approx(60.0)

    def test_shallow_slope_turns_upward(self):
        status = self.integrator.classify(-1.0)
        assert isinstance(status, Unbounded)
        assert 0.05 < status.x_turn < 60.0

    def test_steep_slope_crosses_zero(self):
        status = self.integrator.classify(-2.0)
        assert isinstance(status, Crossing)
        assert 0.05 < status.x_c < 60.0

    def test_bracket_endpoints(self):
        assert isinstance(self.integrator.classify(-1.5), Unbounded)
        assert isinstance(self.integrator.classify(-1.7), Crossing)

    @pytest.mark.parametrize("offset", [1e-12, -1e-12])
    def test_below_horizon_resolution(self, offset):
        assert isinstance(classify(-B_CANONICAL + offset), BoundedSoFar)

    def test_trichotomy_around_canonical_slope(self):
        assert isinstance(self.integrator.classify(-B_CANONICAL + 0.05), Unbounded)
        assert isinstance(self.integrator.classify(-B_CANONICAL - 0.05), Crossing)

    def test_nearly_flat_slope_turns_before_handover(self):
        cfg = IntegratorConfig()
        status = self.integrator.classify(-1e-3)
        assert status == Unbounded(cfg.x_start)

    @pytest.mark.parametrize("slope", [0.0, 0.5])
    def test_non_negative_slope_rejected(self, slope):
        with pytest.raises(PreconditionError):
            self.integrator.integrate(slope)

    def test_describe(self):
        assert Unbounded(1.5).describe().startswith("unbounded")
        assert BoundedSoFar().describe() == "bounded"


class TestTrajectory:
    """数值轨迹性质测试"""

    def test_table_values(self, canonical):
        assert canonical.value(1.0) == pytest.approx(0.4240, abs=1e-4)
        assert canonical.value(0.5) == pytest.approx(0.6070, abs=1e-4)
        assert canonical.value(2.0) == pytest.approx(0.2430, abs=1e-4)
        assert canonical.value(10.0) == pytest.approx(0.0243, abs=5e-4)

    def test_value_at_four_is_monotone_consistent(self, canonical):
        assert canonical.value(4.0) == pytest.approx(0.1084, abs=5e-4)

    def test_monotone_and_convex(self, canonical):
        assert np.all(np.diff(canonical.y) < 0.0)
        assert np.all(canonical.dy < 0.0)
        assert np.all(np.diff(canonical.dy) > 0.0)

    def test_approaches_singular_solution_from_below(self, canonical):
        scaled = [x ** 3 * canonical.value(x) for x in (10.0, 25.0, 40.0, 55.0)]
        assert all(a < b for a, b in zip(scaled, scaled[1:]))
        assert scaled[-1] < SINGULAR_COEFFICIENT

    def test_series_region(self, canonical):
        assert canonical.value(0.0) == 1.0
        assert canonical.derivative(0.0) == pytest.approx(-B_CANONICAL)
        # 交接点两侧连续
        x0 = canonical.x_start
        assert canonical.value(x0 - 1e-12) == pytest.approx(canonical.value(x0), abs=1e-10)

    def test_hermite_interpolation_between_samples(self, canonical):
        x = 1.0005
        assert canonical.value(x) == pytest.approx(0.5 * (canonical.value(1.0) + canonical.value(1.001)), abs=1e-7)
        assert canonical.derivative(x) < 0.0

    def test_beyond_horizon_rejected(self, canonical):
        with pytest.raises(DomainError):
            canonical.value(61.0)

    def test_rows_and_samples(self, canonical):
        rows = canonical.rows()
        assert rows[0][0] == pytest.approx(0.05)
        assert len(rows) == len(canonical.samples)

    def test_step_halving(self, canonical):
        finer = TfIntegrator(IntegratorConfig(h=5e-4)).integrate(-B_CANONICAL)
        assert abs(finer.value(10.0) - canonical.value(10.0)) < 1e-8

    def test_reference_seed_order_still_selectable(self):
        cfg = IntegratorConfig(series_order=HalfPower(9), x_max=20.0)
        trajectory = TfIntegrator(cfg).integrate(-B_CANONICAL)
        assert trajectory.value(1.0) == pytest.approx(0.424008, abs=1e-5)


class TestShooting:
    """打靶测试"""

    def test_default_bracket(self, shot):
        assert shot.B == pytest.approx(B_CANONICAL, abs=1e-6)
        assert shot.lo <= shot.hi
        assert shot.iterations <= 32

    def test_final_bracket_keeps_endpoint_classes(self, shot):
        assert shot.lo < shot.hi
        assert isinstance(classify(shot.lo), Crossing)
        assert isinstance(classify(shot.hi), Unbounded)
        assert shot.B == pytest.approx(-0.5 * (shot.lo + shot.hi))

    def test_unresolved_bracket_is_wider_than_tolerance(self, shot):
        # 默认 tol=1e-10 低于 x_max=60 处的可分辨度
        assert not shot.resolved
        assert shot.hi - shot.lo > 1e-10

    def test_narrow_bracket_uses_fewer_iterations(self, shot):
        narrow = TfIntegrator().shoot(-1.589, -1.588, 1e-12)
        assert narrow.B == pytest.approx(B_CANONICAL, abs=1e-6)
        assert narrow.iterations < shot.iterations

    def test_loose_tolerance(self):
        result = TfIntegrator().shoot(tol=1e-4)
        assert result.B == pytest.approx(B_CANONICAL, abs=1e-4)
        assert result.resolved

    def test_both_endpoints_unbounded(self):
        with pytest.raises(BracketError) as exc_info:
            TfIntegrator().shoot(-1.5, -1.4)
        assert exc_info.value.endpoint == "lo"
        assert exc_info.value.status == "unbounded"

    def test_both_endpoints_crossing(self):
        with pytest.raises(BracketError) as exc_info:
            TfIntegrator().shoot(-1.8, -1.7)
        assert exc_info.value.endpoint == "hi"

    def test_reversed_bracket(self):
        with pytest.raises(BracketError):
            TfIntegrator().shoot(-1.5, -1.7)


class TestBoundedSolution:
    """有界解与尾部模型测试"""

    def test_boundary_values(self, solution):
        assert solution.value(0.0) == 1.0
        assert solution.derivative(0.0) == pytest.approx(-B_CANONICAL)
        assert solution.B == B_CANONICAL

    def test_table_value(self, solution):
        assert solution.value(10.0) == pytest.approx(0.0243, abs=5e-4)

    def test_tail_is_continuous_at_anchor(self, solution):
        x = solution.x_anchor
        assert solution.value(x * (1 + 1e-12)) == pytest.approx(solution.value(x), rel=1e-9)
        assert solution.breakpoints == (x,)

    def test_corrected_tail_tends_to_singular_solution(self, solution):
        far = [x ** 3 * solution.value(x) for x in (1e2, 1e3, 1e5)]
        assert all(a < b for a, b in zip(far, far[1:]))
        assert far[-1] < SINGULAR_COEFFICIENT
        assert far[-1] > 140.0
        assert solution.derivative(1e3) < 0.0

    def test_singular_tail_keeps_anchor_amplitude(self, canonical):
        singular = BoundedSolution(canonical, "singular")
        amplitude = singular.tail_amplitude
        assert 1e3 ** 3 * singular.value(1e3) == pytest.approx(amplitude)
        assert singular.derivative(1e3) == pytest.approx(-3 * amplitude / 1e3 ** 4)

    def test_anchor_skips_turning_samples(self):
        trajectory = TfIntegrator().integrate(-1.5)
        assert isinstance(trajectory.status, Unbounded)
        tail = BoundedSolution(trajectory)
        assert tail.x_anchor < trajectory.x_end
