"""两个有理近似解、动力学一致性检查与两条曲线的交点"""
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from config import DcTolerances
from constants import B_CANONICAL, SINGULAR_COEFFICIENT
from exceptions import ApproximantError, DomainError
from logger import get_logger
from model import TfConstants

logger = get_logger(__name__)


class ApproximantKind(str, Enum):
    """近似式类型"""

    ANSATZ1 = "ansatz1"  # x 的有理函数
    ANSATZ2 = "ansatz2"  # sqrt(x) 的有理函数


@dataclass(frozen=True)
class RationalApproximant:
    """
    y_a(x) = 1 / d(x)

    ansatz1: d = 1 + B x + x^3/144
    ansatz2: d = 1 + B x - (4/3) x^(3/2) + C x^2 + x^3/144
    """

    kind: ApproximantKind
    B: float = B_CANONICAL
    C: float = B_CANONICAL ** 2 / 2.0

    def __post_init__(self):
        if not isinstance(self.kind, ApproximantKind):
            raise ApproximantError(f"未知的近似式类型: {self.kind!r}")
        if self.B <= 0.0:
            raise ApproximantError(f"B 必须为正: {self.B}")
        if self.C < 0.0:
            raise ApproximantError(f"C 不能为负: {self.C}")

    @classmethod
    def canonical(cls, kind: ApproximantKind, B: float = B_CANONICAL) -> "RationalApproximant":
        """C = B^2 / 2"""
        constants = TfConstants.from_b(B)
        return cls(kind, constants.B, constants.C)

    def denominator(self, x: float) -> float:
        d = 1.0 + self.B * x + x ** 3 / SINGULAR_COEFFICIENT
        if self.kind is ApproximantKind.ANSATZ2:
            d += -4.0 / 3.0 * x * math.sqrt(x) + self.C * x * x
        return d

    def denominator_derivative(self, x: float) -> float:
        dd = self.B + x * x / 48.0
        if self.kind is ApproximantKind.ANSATZ2:
            dd += -2.0 * math.sqrt(x) + 2.0 * self.C * x
        return dd

    def value(self, x: float) -> float:
        if x < 0.0:
            raise DomainError(f"近似解仅在 x >= 0 上有定义: x={x}")
        d = self.denominator(x)
        if d == 0.0:
            raise ApproximantError(f"分母在 x={x} 处为零")
        return 1.0 / d

    def derivative(self, x: float) -> float:
        if x < 0.0:
            raise DomainError(f"近似解仅在 x >= 0 上有定义: x={x}")
        d = self.denominator(x)
        if d == 0.0:
            raise ApproximantError(f"分母在 x={x} 处为零")
        return -self.denominator_derivative(x) / (d * d)

    def min_denominator_slope(self) -> float:
        """
        d'(x) 在 x >= 0 上的最小值估计

        ansatz2 先看 B - 2 sqrt(x) + 2 C x 的解析极小值 B - 1/(2C)（x^2/48 只会使其更大），
        再在稠密网格上采样。
        """
        grid = np.concatenate([[0.0], np.logspace(-6, 3, 4001), np.linspace(0.0, 20.0, 20001)])
        sampled = self.B + grid ** 2 / 48.0
        if self.kind is ApproximantKind.ANSATZ2:
            sampled = sampled - 2.0 * np.sqrt(grid) + 2.0 * self.C * grid
        minimum = float(np.min(sampled))
        if self.kind is ApproximantKind.ANSATZ2 and self.C > 0.0:
            x_star = 1.0 / (4.0 * self.C ** 2)
            minimum = min(minimum, self.denominator_derivative(x_star))
        return minimum

    @property
    def has_monotone_denominator(self) -> bool:
        """d(0) = 1 且 d' > 0 蕴含分母处处为正、y' < 0"""
        return self.min_denominator_slope() > 0.0


def eval_approx(a: RationalApproximant, x: float) -> float:
    return a.value(x)


def eval_approx_derivative(a: RationalApproximant, x: float) -> float:
    """解析导数 -d'/d^2；x = 0 处即单侧极限 -B"""
    return a.derivative(x)


@dataclass(frozen=True)
class DcProperty:
    """单项性质的检查结果"""

    name: str
    residual: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        # 分母为零时残差为 inf，JSON 中写 null
        residual = self.residual if math.isfinite(self.residual) else None
        return {"property": self.name, "residual": residual, "tolerance": self.tolerance, "pass": self.passed}


@dataclass(frozen=True)
class DcReport:
    """五项动力学一致性性质的检查报告"""

    kind: ApproximantKind
    properties: Tuple[DcProperty, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def get(self, name: str) -> DcProperty:
        for p in self.properties:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_list(self) -> List[dict]:
        return [p.to_dict() for p in self.properties]

    def to_json(self) -> str:
        return json.dumps(self.to_list(), indent=2, ensure_ascii=False)


DC_PROPERTY_NAMES = ("i", "ii", "iii", "iv", "v")

_SMALL_X_PROBE = 1e-6
_LARGE_X_PROBE = 1e6


def _check_initial(a: RationalApproximant, tol: float) -> DcProperty:
    residual = max(abs(a.value(0.0) - 1.0), abs(a.derivative(0.0) + a.B))
    return DcProperty("i", residual, tol, residual <= tol)


def _check_monotone(a: RationalApproximant, tol: float) -> DcProperty:
    # 0 < y <= 1, -B <= y' < 0
    grid = np.concatenate([[0.0], np.logspace(-4, 3, 2001)])
    worst = 0.0
    strict_ok = True
    for x in grid:
        try:
            y, dy = a.value(float(x)), a.derivative(float(x))
        except ApproximantError:
            worst, strict_ok = math.inf, False
            continue
        if y <= 0.0 or dy >= 0.0:
            strict_ok = False
        worst = max(worst, -y, y - 1.0, -a.B - dy, dy)
    return DcProperty("ii", worst, tol, strict_ok and worst <= tol)


def _check_asymptotic(a: RationalApproximant, tol: float) -> DcProperty:
    x = _LARGE_X_PROBE
    residual = abs(x ** 3 * a.value(x) - SINGULAR_COEFFICIENT)
    return DcProperty("iii", residual, tol, residual <= tol)


def _check_structural(a: RationalApproximant, tol: float) -> DcProperty:
    # ansatz1 是 x 的有理函数，ansatz2 是 sqrt(x) 的有理函数，由构造保证
    residual = 0.0 if a.kind in (ApproximantKind.ANSATZ1, ApproximantKind.ANSATZ2) else math.inf
    return DcProperty("iv", residual, tol, residual <= tol)


def _small_x_ratio(a: RationalApproximant, x: float) -> float:
    return (a.value(x) - (1.0 - a.B * x)) / x ** 1.5


def _check_small_x(a: RationalApproximant, tol: float) -> DcProperty:
    # r(x) = c + a sqrt(x) + O(x)，一步 Richardson 外推消去 sqrt(x) 项
    x = _SMALL_X_PROBE
    estimate = 2.0 * _small_x_ratio(a, x / 4.0) - _small_x_ratio(a, x)
    expected = 0.0 if a.kind is ApproximantKind.ANSATZ1 else 4.0 / 3.0
    residual = abs(estimate - expected)
    return DcProperty("v", residual, tol, residual <= tol)


def dc_check(a: RationalApproximant, tolerances: Optional[DcTolerances] = None) -> DcReport:
    """
    检查五项动力学一致性性质，失败只记录不抛出

    Args:
        a: 有理近似解
        tolerances: 各项容差

    Returns:
        DcReport: 检查报告
    """
    tol = tolerances or DcTolerances()
    checks = (
        _check_initial(a, tol.initial),
        _check_monotone(a, tol.monotone),
        _check_asymptotic(a, tol.asymptotic),
        _check_structural(a, tol.structural),
        _check_small_x(a, tol.small_x),
    )
    report = DcReport(a.kind, checks)
    for prop in checks:
        if not prop.passed:
            logger.info(f"{a.kind.value} 未通过性质 ({prop.name})，残差 {prop.residual:.3e}")
    return report


@dataclass(frozen=True)
class CrossingResult:
    """两条近似曲线的交点"""

    x0: float
    bracket: Tuple[float, float]


def crossing_gap(B: float, C: float, x: float) -> float:
    """g(x) = y_a1(x) - y_a2(x)"""
    first = RationalApproximant(ApproximantKind.ANSATZ1, B, C)
    second = RationalApproximant(ApproximantKind.ANSATZ2, B, C)
    return first.value(x) - second.value(x)


def find_crossing(B: float = B_CANONICAL, C: Optional[float] = None, tol: float = 1e-10) -> CrossingResult:
    """
    在自动扩展的区间上二分求 g 的零点，要求左侧 g < 0、右侧 g > 0

    Raises:
        ApproximantError: (1e-3, 1e3) 内找不到符号变化
    """
    C = B * B / 2.0 if C is None else C
    lo, hi = 0.1, 2.0
    while crossing_gap(B, C, lo) >= 0.0 or crossing_gap(B, C, hi) <= 0.0:
        if crossing_gap(B, C, lo) >= 0.0:
            lo /= 2.0
        if crossing_gap(B, C, hi) <= 0.0:
            hi *= 2.0
        if lo < 1e-3 or hi > 1e3:
            raise ApproximantError(f"在 (1e-3, 1e3) 内找不到 y_a1 - y_a2 的符号变化 (B={B}, C={C})")

    bracket = (lo, hi)
    x0 = float(optimize.bisect(lambda x: crossing_gap(B, C, x), lo, hi, xtol=tol))
    logger.debug(f"交点 x0={x0!r}，初始区间 {bracket}")
    return CrossingResult(x0, bracket)
