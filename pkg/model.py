"""Thomas-Fermi 方程的共享类型与精确奇异解

方程 y'' = y^(3/2) / sqrt(x)，边界条件 y(0) = 1, y(inf) = 0。
"""
import math
from dataclasses import dataclass
from typing import Optional, Protocol, runtime_checkable

from constants import B_CANONICAL, SINGULAR_COEFFICIENT
from exceptions import DomainError


@dataclass(frozen=True)
class TfConstants:
    """初始斜率常数 B 与第二个近似式的系数 C"""

    B: float = B_CANONICAL
    C: float = B_CANONICAL ** 2 / 2.0

    def __post_init__(self):
        if self.B <= 0.0:
            raise DomainError(f"B 必须为正: {self.B}")
        if self.C <= 0.0:
            raise DomainError(f"C 必须为正: {self.C}")

    @classmethod
    def from_b(cls, B: float = B_CANONICAL) -> "TfConstants":
        """由 B 构造，C = B^2 / 2"""
        return cls(B=B, C=B * B / 2.0)


@dataclass(frozen=True)
class SolutionSample:
    """轨迹上的一个采样点"""

    x: float
    y: float
    dy: float


@runtime_checkable
class EvaluableSolution(Protocol):
    """可求值的解：数值轨迹、级数与有理近似共用的接口"""

    def value(self, x: float) -> float:
        ...

    def derivative(self, x: float) -> float:
        ...


def singular_solution(x: float) -> float:
    """
    奇异（渐近）解 144 / x^3

    Raises:
        DomainError: x <= 0
    """
    if x <= 0.0:
        raise DomainError(f"奇异解仅在 x > 0 上有定义: x={x}")
    return SINGULAR_COEFFICIENT / x ** 3


def tf_rhs(x: float, y: float) -> float:
    """
    方程右端 y^(3/2) / sqrt(x)

    负的 y 不能求值，调用方应将 y 变号视为积分终止事件。

    Raises:
        DomainError: x <= 0 或 y < 0
    """
    if x <= 0.0:
        raise DomainError(f"右端项要求 x > 0: x={x}")
    if y < 0.0:
        raise DomainError(f"右端项要求 y >= 0: y={y}")
    return y * math.sqrt(y) / math.sqrt(x)


class SingularSolution:
    """以 EvaluableSolution 接口包装 144/x^3，可选地只在 x >= lower 上使用"""

    def __init__(self, lower: Optional[float] = None):
        self.lower = lower

    def value(self, x: float) -> float:
        if self.lower is not None and x < self.lower:
            return 0.0
        return singular_solution(x)

    def derivative(self, x: float) -> float:
        if self.lower is not None and x < self.lower:
            return 0.0
        if x <= 0.0:
            raise DomainError(f"奇异解仅在 x > 0 上有定义: x={x}")
        return -3.0 * SINGULAR_COEFFICIENT / x ** 4
