"""Thomas-Fermi 方程的RK4前向积分、轨迹分类与打靶求 B"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import ClassVar, List, Optional, Tuple, Union

import numpy as np

from config import IntegratorConfig
from constants import (
    B_CANONICAL, SINGULAR_COEFFICIENT, ASYMPTOTIC_CORRECTION_EXPONENT,
    DEFAULT_SHOOT_LO, DEFAULT_SHOOT_HI, DEFAULT_SHOOT_TOL,
)
from exceptions import BracketError, DomainError, IntegrationError, PreconditionError
from logger import LoggerMixin, log_function_call
from model import SolutionSample, tf_rhs
from series import TfSeries, eval_series, eval_series_derivative, iterate_to_convergence


@dataclass(frozen=True)
class Crossing:
    """y 在 x_c 处变号"""

    x_c: float
    name: ClassVar[str] = "crossing"

    def describe(self) -> str:
        return f"{self.name} x_c={self.x_c:.6f}"


@dataclass(frozen=True)
class Unbounded:
    """y' 在 x_turn 处变为非负，之后由凹性必然增长"""

    x_turn: float
    name: ClassVar[str] = "unbounded"

    def describe(self) -> str:
        return f"{self.name} x_turn={self.x_turn:.6f}"


@dataclass(frozen=True)
class BoundedSoFar:
    """到积分上限为止没有事件"""

    name: ClassVar[str] = "bounded"

    def describe(self) -> str:
        return self.name


Classification = Union[Crossing, Unbounded, BoundedSoFar]


@lru_cache(maxsize=256)
def seed_series(B: float, order: int) -> TfSeries:
    """以 B 为初始斜率大小的小x展开，作为RK4的起点"""
    series, _ = iterate_to_convergence(B, order)
    return series


@dataclass(frozen=True, eq=False)
class SolutionTrajectory:
    """RK4 采样轨迹，采样点之间用三次 Hermite 插值，x < x_start 由种子级数给出"""

    x: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    slope: float
    status: Classification
    seed: TfSeries = field(repr=False)

    @property
    def x_start(self) -> float:
        return float(self.x[0])

    @property
    def x_end(self) -> float:
        return float(self.x[-1])

    @property
    def samples(self) -> List[SolutionSample]:
        return [SolutionSample(float(a), float(b), float(c)) for a, b, c in zip(self.x, self.y, self.dy)]

    def rows(self) -> List[Tuple[float, float, float]]:
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.x, self.y, self.dy)]

    def _locate(self, x: float) -> Tuple[int, float, float]:
        if x > self.x_end:
            raise DomainError(f"x={x} 超出轨迹范围 [0, {self.x_end}]")
        i = int(np.searchsorted(self.x, x, side="right")) - 1
        i = min(max(i, 0), len(self.x) - 2)
        h = float(self.x[i + 1] - self.x[i])
        return i, h, (x - float(self.x[i])) / h

    def value(self, x: float) -> float:
        if x < 0.0:
            raise DomainError(f"x 不能为负: {x}")
        if x < self.x_start:
            return eval_series(self.seed, x)
        if len(self.x) == 1:
            return float(self.y[0])
        i, h, t = self._locate(x)
        t2, t3 = t * t, t * t * t
        return float((2 * t3 - 3 * t2 + 1) * self.y[i] + (t3 - 2 * t2 + t) * h * self.dy[i]
                + (-2 * t3 + 3 * t2) * self.y[i + 1] + (t3 - t2) * h * self.dy[i + 1])

    def derivative(self, x: float) -> float:
        if x < 0.0:
            raise DomainError(f"x 不能为负: {x}")
        if x < self.x_start:
            return eval_series_derivative(self.seed, x)
        if len(self.x) == 1:
            return float(self.dy[0])
        i, h, t = self._locate(x)
        t2 = t * t
        return float((6 * t2 - 6 * t) / h * (self.y[i] - self.y[i + 1])
                + (3 * t2 - 4 * t + 1) * self.dy[i] + (3 * t2 - 2 * t) * self.dy[i + 1])


def _rk4_step(x: float, y: float, v: float, h: float) -> Optional[Tuple[float, float]]:
    # 任一中间级 y < 0 时返回 None，右端项不对负值求值
    half = 0.5 * h
    k1y, k1v = v, tf_rhs(x, y)
    y2 = y + half * k1y
    if y2 < 0.0:
        return None
    k2y, k2v = v + half * k1v, tf_rhs(x + half, y2)
    y3 = y + half * k2y
    if y3 < 0.0:
        return None
    k3y, k3v = v + half * k2v, tf_rhs(x + half, y3)
    y4 = y + h * k3y
    if y4 < 0.0:
        return None
    k4y, k4v = v + h * k3v, tf_rhs(x + h, y4)
    return (y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y),
            v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v))


@dataclass(frozen=True)
class ShootResult:
    """打靶结果"""

    B: float
    iterations: int
    lo: float
    hi: float
    resolved: bool  # False 表示区间宽度已低于积分上限处的可分辨度


class TfIntegrator(LoggerMixin):
    """固定步长RK4积分器"""

    def __init__(self, config: Optional[IntegratorConfig] = None):
        self.config = config or IntegratorConfig()

    def integrate(self, slope: float) -> SolutionTrajectory:
        """
        以 y(0)=1, y'(0)=slope 积分到第一个分类事件或 x_max

        Raises:
            PreconditionError: slope >= 0
        """
        if slope >= 0.0:
            raise PreconditionError(f"初始斜率必须为负: {slope}")
        cfg = self.config
        seed = seed_series(-slope, cfg.series_order.twice_power)
        x0, h = cfg.x_start, cfg.h
        y, v = eval_series(seed, x0), eval_series_derivative(seed, x0)
        if y <= 0.0:
            raise IntegrationError(f"种子级数在 x_start={x0} 处给出非物理初值 y={y}")

        xs, ys, vs = [x0], [y], [v]
        status: Classification = BoundedSoFar()
        n_steps = int(round((cfg.x_max - x0) / h))
        if v >= 0.0:
            # 斜率太平缓，交接点之前已经转向
            status = Unbounded(x0)
            n_steps = 0
        for i in range(n_steps):
            x = x0 + i * h
            step = _rk4_step(x, y, v, h)
            if step is None:
                status = Crossing(min(x - y / v, x + h))
                break
            y_new, v_new = step
            x_new = x0 + (i + 1) * h
            if y_new <= 0.0:
                status = Crossing(x + h * y / (y - y_new))
                break
            xs.append(x_new)
            ys.append(y_new)
            vs.append(v_new)
            if v_new >= 0.0:
                status = Unbounded(x_new)
                break
            y, v = y_new, v_new

        self.logger.debug(f"斜率 {slope!r}: {status.describe()}，共 {len(xs)} 个采样点")
        return SolutionTrajectory(np.asarray(xs), np.asarray(ys), np.asarray(vs), slope, status, seed)

    def classify(self, slope: float) -> Classification:
        return self.integrate(slope).status

    @log_function_call
    def shoot(
        self,
        bracket_lo: float = DEFAULT_SHOOT_LO,
        bracket_hi: float = DEFAULT_SHOOT_HI,
        tol: float = DEFAULT_SHOOT_TOL,
    ) -> ShootResult:
        """
        对初始斜率二分，始终保持 lo 穿越零点、hi 无界

        Raises:
            BracketError: 端点分类不符合要求
        """
        if not bracket_lo < bracket_hi:
            raise BracketError(f"要求 lo < hi，实际 lo={bracket_lo}, hi={bracket_hi}")
        lo_status = self.classify(bracket_lo)
        if not isinstance(lo_status, Crossing):
            raise BracketError(
                f"下端点 {bracket_lo} 应穿越零点，实际为 {lo_status.name}",
                endpoint="lo", status=lo_status.name,
            )
        hi_status = self.classify(bracket_hi)
        if not isinstance(hi_status, Unbounded):
            raise BracketError(
                f"上端点 {bracket_hi} 应无界，实际为 {hi_status.name}",
                endpoint="hi", status=hi_status.name,
            )

        lo, hi = bracket_lo, bracket_hi
        iterations = 0
        resolved = True
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            status = self.classify(mid)
            iterations += 1
            if isinstance(status, Crossing):
                lo = mid
            elif isinstance(status, Unbounded):
                hi = mid
            else:
                self.logger.info(f"斜率 {mid!r} 在 x_max={self.config.x_max} 内无事件，区间宽度 {hi - lo:.3e} 已不可分辨")
                resolved = False
                break

        B = -0.5 * (lo + hi)
        self.logger.info(f"打靶结果 B={B!r}，迭代 {iterations} 次")
        return ShootResult(B, iterations, lo, hi, resolved)

    def bounded_solution(self, B: float = B_CANONICAL) -> "BoundedSolution":
        trajectory = self.integrate(-B)
        if not isinstance(trajectory.status, BoundedSoFar):
            self.logger.warning(
                f"斜率 -{B!r} 在 x_max 之前发生 {trajectory.status.describe()}，尾部锚点前移到 x={trajectory.x_end:.3f}"
            )
        return BoundedSolution(trajectory, self.config.tail_model)


class BoundedSolution:
    """有界解：锚点以内用RK4轨迹，锚点以外用连续衔接的大x衰减律"""

    def __init__(self, trajectory: SolutionTrajectory, tail_model: str = "corrected"):
        self.trajectory = trajectory
        self.tail_model = tail_model
        # 锚点取最后一个 y > 0 且 y' < 0 的采样
        anchor = len(trajectory.x) - 1
        while anchor > 0 and trajectory.dy[anchor] >= 0.0:
            anchor -= 1
        self.x_anchor = float(trajectory.x[anchor])
        self.y_anchor = float(trajectory.y[anchor])
        self.tail_amplitude = self.x_anchor ** 3 * self.y_anchor
        self.correction = 0.0
        if tail_model == "corrected" and self.tail_amplitude < SINGULAR_COEFFICIENT:
            r = ASYMPTOTIC_CORRECTION_EXPONENT
            self.correction = (1.0 - self.tail_amplitude / SINGULAR_COEFFICIENT) * self.x_anchor ** r

    @property
    def B(self) -> float:
        return -self.trajectory.slope

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """导数在锚点处不连续"""
        return (self.x_anchor,)

    def value(self, x: float) -> float:
        if x <= self.x_anchor:
            return self.trajectory.value(x)
        if self.correction:
            r = ASYMPTOTIC_CORRECTION_EXPONENT
            return SINGULAR_COEFFICIENT / x ** 3 * (1.0 - self.correction * x ** (-r))
        return self.tail_amplitude / x ** 3

    def derivative(self, x: float) -> float:
        if x <= self.x_anchor:
            return self.trajectory.derivative(x)
        if self.correction:
            r = ASYMPTOTIC_CORRECTION_EXPONENT
            return (-3.0 * SINGULAR_COEFFICIENT / x ** 4
                    + (3.0 + r) * SINGULAR_COEFFICIENT * self.correction * x ** (-4.0 - r))
        return -3.0 * self.tail_amplitude / x ** 4


def integrate(slope: float, cfg: Optional[IntegratorConfig] = None) -> SolutionTrajectory:
    return TfIntegrator(cfg).integrate(slope)


def classify(slope: float, cfg: Optional[IntegratorConfig] = None) -> Classification:
    return TfIntegrator(cfg).classify(slope)


def shoot(
    bracket_lo: float = DEFAULT_SHOOT_LO,
    bracket_hi: float = DEFAULT_SHOOT_HI,
    tol: float = DEFAULT_SHOOT_TOL,
    cfg: Optional[IntegratorConfig] = None,
) -> float:
    """打靶求 B 的估计值"""
    return TfIntegrator(cfg).shoot(bracket_lo, bracket_hi, tol).B


def bounded_solution(cfg: Optional[IntegratorConfig] = None) -> BoundedSolution:
    """以标准 B 积分得到的有界解"""
    return TfIntegrator(cfg).bounded_solution()

