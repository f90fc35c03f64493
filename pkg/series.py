"""半整数幂级数运算与小x展开的迭代构造

级数形如 sum c * x^(n/2)，指数以两倍的整数 n 精确存储。系数可以是
浮点数、Fraction，或以 sympy 符号 B 表示的精确多项式。
"""
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple, Union

import sympy as sp

from constants import REFERENCE_TWICE_POWER
from exceptions import DomainError, PreconditionError, SeriesError
from logger import get_logger

logger = get_logger(__name__)

Coefficient = Union[float, Fraction, sp.Expr]

# 符号计算时使用的 B
B_SYMBOL = sp.Symbol("B", positive=True)


@dataclass(frozen=True, order=True)
class HalfPower:
    """指数 p = twice_power / 2"""

    twice_power: int

    def __post_init__(self):
        if isinstance(self.twice_power, bool) or not isinstance(self.twice_power, int):
            raise SeriesError(f"指数必须以整数 n 表示 p = n/2: {self.twice_power!r}")

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.twice_power, 2)

    @property
    def is_half_integer(self) -> bool:
        return self.twice_power % 2 == 1

    @classmethod
    def parse(cls, text: str) -> "HalfPower":
        """解析 "9/2"、"4"、"4.5" 形式的指数"""
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise SeriesError(f"无法解析指数: {text!r}") from e
        twice = value * 2
        if twice.denominator != 1:
            raise SeriesError(f"指数必须是半整数: {text!r}")
        return cls(int(twice))

    def __str__(self) -> str:
        if self.twice_power % 2 == 0:
            return str(self.twice_power // 2)
        return f"{self.twice_power}/2"


def _normalize(c) -> Coefficient:
    if isinstance(c, sp.Basic):
        return sp.expand(c)
    if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
        return Fraction(c)
    return float(c)


def _is_zero(c: Coefficient) -> bool:
    return c == 0


def _scale(c: Coefficient, factor: Fraction) -> Coefficient:
    if isinstance(c, sp.Basic):
        return c * sp.Rational(factor.numerator, factor.denominator)
    if isinstance(c, Fraction):
        return c * factor
    return c * float(factor)


@dataclass(frozen=True)
class TfSeries:
    """截断的半整数幂级数，模 o(x^(truncation_twice_power/2)) 有效"""

    terms: Tuple[Tuple[HalfPower, Coefficient], ...]
    truncation_twice_power: int

    def __post_init__(self):
        powers = [p.twice_power for p, _ in self.terms]
        if any(b <= a for a, b in zip(powers, powers[1:])):
            raise SeriesError("级数指数必须严格递增")
        if powers and powers[-1] > self.truncation_twice_power:
            raise SeriesError(f"指数 {powers[-1]}/2 超出截断阶 {self.truncation_twice_power}/2")
        if any(_is_zero(c) for _, c in self.terms):
            raise SeriesError("级数中不应存储零系数")

    @classmethod
    def from_mapping(cls, coefficients: Mapping[int, object], truncation_twice_power: int) -> "TfSeries":
        """由 {两倍指数: 系数} 构造，丢弃零系数与超出截断阶的项"""
        terms = []
        for n in sorted(coefficients):
            if n > truncation_twice_power:
                continue
            c = _normalize(coefficients[n])
            if not _is_zero(c):
                terms.append((HalfPower(n), c))
        return cls(tuple(terms), truncation_twice_power)

    @classmethod
    def zero(cls, truncation_twice_power: int) -> "TfSeries":
        return cls((), truncation_twice_power)

    @classmethod
    def constant(cls, value, truncation_twice_power: int) -> "TfSeries":
        return cls.from_mapping({0: value}, truncation_twice_power)

    def as_dict(self) -> Dict[int, Coefficient]:
        return {p.twice_power: c for p, c in self.terms}

    def coefficient(self, power: Union[int, HalfPower]) -> Coefficient:
        n = power.twice_power if isinstance(power, HalfPower) else power
        return self.as_dict().get(n, Fraction(0))

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(c, sp.Basic) for _, c in self.terms)

    def to_dict(self) -> dict:
        """JSON 友好的表示"""
        return {
            "truncation_twice_power": self.truncation_twice_power,
            "terms": [
                {"twice_power": p.twice_power, "coefficient": coefficient_to_json(c)}
                for p, c in self.terms
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def coefficient_to_json(c: Coefficient):
    if isinstance(c, sp.Basic):
        return str(c) if c.free_symbols else float(c)
    return float(c)


def format_coefficient(c: Coefficient) -> str:
    """系数的可读形式：符号式、分数或浮点数"""
    if isinstance(c, sp.Basic):
        return sp.sstr(c)
    if isinstance(c, Fraction):
        return str(c)
    return repr(c)


def series_truncate(s: TfSeries, order: Union[int, HalfPower]) -> TfSeries:
    n_max = order.twice_power if isinstance(order, HalfPower) else order
    n_max = min(n_max, s.truncation_twice_power)
    return TfSeries(tuple((p, c) for p, c in s.terms if p.twice_power <= n_max), n_max)


def series_add(a: TfSeries, b: TfSeries) -> TfSeries:
    """逐项相加，截断阶取两者的较小值"""
    truncation = min(a.truncation_twice_power, b.truncation_twice_power)
    acc: Dict[int, Coefficient] = {}
    for p, c in a.terms + b.terms:
        acc[p.twice_power] = acc[p.twice_power] + c if p.twice_power in acc else c
    return TfSeries.from_mapping(acc, truncation)


def _multiply(a: TfSeries, b: TfSeries, truncation: int) -> TfSeries:
    acc: Dict[int, Coefficient] = {}
    for pa, ca in a.terms:
        for pb, cb in b.terms:
            n = pa.twice_power + pb.twice_power
            if n > truncation:
                continue
            acc[n] = acc[n] + ca * cb if n in acc else ca * cb
    return TfSeries.from_mapping(acc, truncation)


def series_pow_three_halves(s: TfSeries) -> TfSeries:
    """
    (1 + w)^(3/2) 的截断广义二项式展开

    Raises:
        PreconditionError: 常数项不等于 1
    """
    c0 = s.coefficient(0)
    unit = sp.expand(c0 - 1) == 0 if isinstance(c0, sp.Basic) else c0 == 1
    if not unit:
        raise PreconditionError(f"常数项必须为 1（缩放由调用方负责），实际为 {c0}")

    truncation = s.truncation_twice_power
    w = TfSeries(tuple((p, c) for p, c in s.terms if p.twice_power != 0), truncation)
    if not w.terms:
        return TfSeries.constant(1, truncation)
    lowest = w.terms[0][0].twice_power
    if lowest <= 0:
        raise PreconditionError(f"w 的最低指数必须为正: {lowest}/2")

    result = TfSeries.constant(1, truncation)
    power = TfSeries.constant(1, truncation)
    binom = Fraction(1)
    # w^k 的最低指数为 k*lowest，超过截断阶即可停止
    for k in range(1, truncation // lowest + 1):
        binom = binom * (Fraction(3, 2) - k + 1) / k
        power = _multiply(power, w, truncation)
        scaled = TfSeries.from_mapping(
            {p.twice_power: _scale(c, binom) for p, c in power.terms}, truncation
        )
        result = series_add(result, scaled)
    return result


def series_divide_sqrt_x(s: TfSeries) -> TfSeries:
    """
    每个指数减 1/2，系数不变

    Raises:
        SeriesError: 结果指数小于 -1/2
    """
    shifted = {}
    for p, c in s.terms:
        n = p.twice_power - 1
        if n < -1:
            raise SeriesError(f"除以 sqrt(x) 后指数 {n}/2 不可积")
        shifted[n] = c
    return TfSeries.from_mapping(shifted, s.truncation_twice_power - 1)


def series_integrate_twice(s: TfSeries, y0, dy0) -> TfSeries:
    """
    两次积分并施加初值: c x^p -> c x^(p+2) / ((p+1)(p+2))，再加上 y0 + dy0 x

    Raises:
        SeriesError: 存在指数 < -1/2
    """
    integrated: Dict[int, Coefficient] = {}
    for hp, c in s.terms:
        if hp.twice_power < -1:
            raise SeriesError(f"指数 {hp} 低于 -1/2，无法两次积分")
        p = hp.exponent
        integrated[hp.twice_power + 4] = _scale(c, 1 / ((p + 1) * (p + 2)))
    integrated[0] = integrated.get(0, 0) + y0
    integrated[2] = integrated.get(2, 0) + dy0
    return TfSeries.from_mapping(integrated, s.truncation_twice_power + 4)


def series_derivative(s: TfSeries) -> TfSeries:
    """逐项求导"""
    differentiated = {}
    for hp, c in s.terms:
        if hp.twice_power == 0:
            continue
        differentiated[hp.twice_power - 2] = _scale(c, hp.exponent)
    return TfSeries.from_mapping(differentiated, s.truncation_twice_power - 2)


def iterate_tf(series_n: TfSeries, B, order: Union[int, HalfPower]) -> TfSeries:
    """
    迭代一步: y_{N+1}'' = y_N^(3/2) / sqrt(x)，y_{N+1}(0) = 1, y_{N+1}'(0) = -B

    Args:
        series_n: 当前迭代 y_N，常数项为 1
        B: 初始斜率大小（浮点数或 sympy 符号）
        order: 工作截断阶

    Returns:
        TfSeries: y_{N+1}，截断到 order
    """
    n_max = order.twice_power if isinstance(order, HalfPower) else order
    start = series_truncate(series_n, n_max)
    rhs = series_divide_sqrt_x(series_pow_three_halves(start))
    return series_truncate(series_integrate_twice(rhs, 1, -B), n_max)


def iterate_to_convergence(
    B,
    order: Union[int, HalfPower] = REFERENCE_TWICE_POWER,
    max_iterations: Optional[int] = None,
) -> Tuple[TfSeries, int]:
    """
    从 y_0 = 1 出发迭代，直到截断阶以内的所有项不再变化

    每次迭代只有更高阶的项会改变，因此收敛判定是精确相等。

    Returns:
        Tuple[TfSeries, int]: (收敛的级数, 迭代次数)
    """
    n_max = order.twice_power if isinstance(order, HalfPower) else order
    limit = max_iterations if max_iterations is not None else n_max + 2
    current = TfSeries.constant(1, n_max)
    for iteration in range(1, limit + 1):
        following = iterate_tf(current, B, n_max)
        if series_equal(following, current):
            logger.debug(f"级数迭代在第 {iteration - 1} 步收敛（阶 {n_max}/2）")
            return current, iteration - 1
        current = following
    if max_iterations is None:
        raise SeriesError(f"级数迭代 {limit} 步后仍未收敛")
    return current, limit


def series_equal(a: TfSeries, b: TfSeries) -> bool:
    da, db = a.as_dict(), b.as_dict()
    if da.keys() != db.keys():
        return False
    for n, c in da.items():
        diff = c - db[n]
        if not (sp.expand(diff) == 0 if isinstance(diff, sp.Basic) else diff == 0):
            return False
    return True


def reference_series(B) -> TfSeries:
    """已知的小x展开，截断到 x^(9/2)"""
    if not isinstance(B, sp.Basic) and B <= 0:
        raise DomainError(f"B 必须为正: {B}")
    if isinstance(B, sp.Basic):
        q = sp.Rational
    else:
        def q(num, den):
            return Fraction(num, den)
    coefficients = {
        0: 1,
        2: -B,
        3: q(4, 3),
        5: -q(2, 5) * B,
        6: q(1, 3),
        7: q(3, 70) * B ** 2,
        8: -q(2, 15) * B,
        9: q(2, 27) + B ** 3 / 252,
    }
    return TfSeries.from_mapping(coefficients, REFERENCE_TWICE_POWER)


def symbolic_series(
    order: Union[int, HalfPower] = REFERENCE_TWICE_POWER,
    iterations: Optional[int] = None,
) -> Tuple[TfSeries, int]:
    """以 B 为符号运行迭代；iterations 为 None 时迭代到收敛"""
    if iterations is None:
        return iterate_to_convergence(B_SYMBOL, order)
    n_max = order.twice_power if isinstance(order, HalfPower) else order
    current = TfSeries.constant(1, n_max)
    for _ in range(iterations):
        current = iterate_tf(current, B_SYMBOL, n_max)
    return current, iterations


def substitute_b(s: TfSeries, B: float) -> TfSeries:
    """把符号系数中的 B 代入数值"""
    values = {}
    for p, c in s.terms:
        values[p.twice_power] = float(c.subs(B_SYMBOL, B)) if isinstance(c, sp.Basic) else c
    return TfSeries.from_mapping(values, s.truncation_twice_power)


def eval_series(s: TfSeries, x: float) -> float:
    """
    求和 sum c x^p，只做一次开方，其余为整数次幂

    Raises:
        DomainError: x < 0，或 x = 0 时存在负指数
    """
    if x < 0.0:
        raise DomainError(f"级数仅在 x >= 0 上求值: x={x}")
    root = math.sqrt(x)
    total = 0.0
    for p, c in s.terms:
        if p.twice_power < 0 and root == 0.0:
            raise DomainError(f"x=0 处指数 {p} 发散")
        total += float(c) * root ** p.twice_power
    return total


def eval_series_derivative(s: TfSeries, x: float) -> float:
    """
    求和 sum c p x^(p-1)；x = 0 时返回有限的极限值

    Raises:
        DomainError: x < 0，或 x = 0 时导数发散
    """
    if x < 0.0:
        raise DomainError(f"级数仅在 x >= 0 上求值: x={x}")
    root = math.sqrt(x)
    total = 0.0
    for p, c in s.terms:
        if p.twice_power == 0:
            continue
        if p.twice_power < 2 and root == 0.0:
            raise DomainError(f"x=0 处 x^{p} 的导数发散")
        total += float(c) * float(p.exponent) * root ** (p.twice_power - 2)
    return total


class SeriesSolution:
    """以 EvaluableSolution 接口包装数值级数"""

    def __init__(self, series: TfSeries):
        if series.is_symbolic:
            raise SeriesError("符号级数需先代入 B 才能求值")
        self.series = series

    def value(self, x: float) -> float:
        return eval_series(self.series, x)

    def derivative(self, x: float) -> float:
        return eval_series_derivative(self.series, x)
