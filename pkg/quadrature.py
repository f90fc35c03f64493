"""反常积分与四条求和规则

(0, split] 上用 x = u^2 换元消去 x^(-1/2) 奇点，[split, inf) 上用 x = split + t/(1-t) 映射到 [0, 1)，
两段都用自适应 Simpson。
"""
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

from config import QuadratureConfig
from exceptions import QuadratureError, ThomasFermiError
from logger import LoggerMixin, log_function_call
from model import EvaluableSolution

Integrand = Callable[[float], float]

# 端点向区间内收缩的相对距离：端点可能是奇点，或落在断点的另一侧
_ENDPOINT_NUDGE = 1e-13


def _adaptive_simpson(
    g: Integrand, a: float, b: float,
    fa: float, fm: float, fb: float, whole: float,
    tol: float, depth: int, cfg: QuadratureConfig,
) -> Tuple[float, bool]:
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = g(lm), g(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = abs(left + right - whole)
    if depth >= cfg.min_depth and err < tol:
        return (16.0 * (left + right) - whole) / 15.0, True
    if depth >= cfg.max_depth:
        return (16.0 * (left + right) - whole) / 15.0, False
    v_left, ok_left = _adaptive_simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth + 1, cfg)
    v_right, ok_right = _adaptive_simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth + 1, cfg)
    return v_left + v_right, ok_left and ok_right


def adaptive_simpson(g: Integrand, a: float, b: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """
    有限区间上的自适应 Simpson，相对容差取自配置

    Raises:
        QuadratureError: 超过最大递归深度，携带当前最佳估计
    """
    cfg = cfg or QuadratureConfig()
    if a == b:
        return 0.0
    delta = _ENDPOINT_NUDGE * (b - a)
    fa, fm, fb = g(a + delta), g(0.5 * (a + b)), g(b - delta)

    # 先用 32 段复合 Simpson 估计量级，把相对容差换算成绝对容差
    n = 32
    width = (b - a) / n
    nodes = [fa] + [g(a + i * width) for i in range(1, n)] + [fb]
    coarse = width / 3.0 * (nodes[0] + nodes[-1] + 4.0 * sum(nodes[1:-1:2]) + 2.0 * sum(nodes[2:-1:2]))
    tol = cfg.rel_tol * (abs(coarse) if coarse != 0.0 else 1.0)

    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    value, accurate = _adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 0, cfg)
    if not accurate:
        raise QuadratureError(
            f"自适应 Simpson 在 [{a}, {b}] 上超过最大递归深度 {cfg.max_depth}", estimate=value, accurate=False
        )
    return value


def integrate_sqrt_singular(f: Integrand, upper: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """∫_0^upper f(x) dx，换元 x = u^2"""

    def g(u: float) -> float:
        return 2.0 * u * f(u * u)

    return adaptive_simpson(g, 0.0, math.sqrt(upper), cfg)


def integrate_tail(f: Integrand, lower: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """
    ∫_lower^inf f(x) dx，映射 x = lower + t/(1-t)

    f 须比 x^(-2) 衰减得快，t = 1 端点取 0。
    """

    def g(t: float) -> float:
        if t >= 1.0:
            return 0.0
        s = 1.0 - t
        return f(lower + t / s) / (s * s)

    return adaptive_simpson(g, 0.0, 1.0, cfg)


def integrate_improper(
    f: Integrand, cfg: Optional[QuadratureConfig] = None, breakpoints: Sequence[float] = ()
) -> float:
    """
    ∫_0^inf f(x) dx，在 split 处分成两段

    breakpoints 为 f 可能不连续的点（如数值解与尾部律的衔接点），大于 split 的点把中间段再切开。
    """
    cfg = cfg or QuadratureConfig()
    return _integrate_from(f, 0.0, cfg, breakpoints)


def _integrate_from(f: Integrand, lower: float, cfg: QuadratureConfig, breakpoints: Sequence[float]) -> float:
    total = 0.0
    start = lower
    if lower <= 0.0:
        total += integrate_sqrt_singular(f, cfg.split, cfg)
        start = cfg.split
    for point in sorted(p for p in breakpoints if p > start):
        total += adaptive_simpson(f, start, point, cfg)
        start = point
    return total + integrate_tail(f, start, cfg)


def _integrate_rule(f: Integrand, cfg: QuadratureConfig, lower: float, sol: EvaluableSolution) -> float:
    return _integrate_from(f, lower, cfg, getattr(sol, "breakpoints", ()))


def _y(sol: EvaluableSolution, x: float) -> float:
    # 插值或尾部模型可能给出 -0 量级的负值
    return max(sol.value(x), 0.0)


@dataclass
class SumRuleReport:
    """四条求和规则及 B 的相对误差"""

    rule_norm: Optional[float]
    rule_balance_lhs: Optional[float]
    rule_balance_rhs: Optional[float]
    rule_energy: Optional[float]
    rule_slope: Optional[float]
    b_input: float
    fractional_error_pct: Optional[float]
    failures: Dict[str, str] = field(default_factory=dict)

    @property
    def balance_relative_difference(self) -> Optional[float]:
        if self.rule_balance_lhs is None or self.rule_balance_rhs is None:
            return None
        return (self.rule_balance_lhs - self.rule_balance_rhs) / self.rule_balance_lhs

    def to_dict(self) -> dict:
        """只含报告字段；失败的规则见 failures，值为 None 或最佳估计"""
        data = asdict(self)
        del data["failures"]
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def fractional_error_pct(b_input: float, b_estimate: float) -> float:
    """100 * (B_input - B_estimate) / B_input"""
    return 100.0 * (b_input - b_estimate) / b_input


class SumRuleEvaluator(LoggerMixin):
    """对任意可求值的解计算求和规则"""

    def __init__(self, config: Optional[QuadratureConfig] = None):
        self.config = config or QuadratureConfig()

    def norm(self, sol: EvaluableSolution, lower: float = 0.0) -> float:
        """∫ sqrt(x) y^(3/2) dx，精确解为 1"""

        def f(x: float) -> float:
            y = _y(sol, x)
            return math.sqrt(x) * y * math.sqrt(y)

        return _integrate_rule(f, self.config, lower, sol)

    def balance(self, sol: EvaluableSolution, lower: float = 0.0) -> Tuple[float, float]:
        """(∫ y dx, 1/2 ∫ x^(3/2) y^(3/2) dx)，精确解两者相等"""
        lhs = _integrate_rule(lambda x: _y(sol, x), self.config, lower, sol)

        def f(x: float) -> float:
            y = _y(sol, x)
            return 0.5 * x * math.sqrt(x) * y * math.sqrt(y)

        return lhs, _integrate_rule(f, self.config, lower, sol)

    def kinetic(self, sol: EvaluableSolution, lower: float = 0.0) -> float:
        """∫ (y')^2 dx"""

        def f(x: float) -> float:
            dy = sol.derivative(x)
            return dy * dy

        return _integrate_rule(f, self.config, lower, sol)

    def potential(self, sol: EvaluableSolution, lower: float = 0.0) -> float:
        """∫ y^(5/2) / sqrt(x) dx"""

        def f(x: float) -> float:
            y = _y(sol, x)
            return y * y * math.sqrt(y) / math.sqrt(x)

        return _integrate_rule(f, self.config, lower, sol)

    def energy(self, sol: EvaluableSolution, lower: float = 0.0) -> float:
        """∫ [(y')^2 + y^(5/2)/sqrt(x)] dx，精确解为 B"""

        def f(x: float) -> float:
            y = _y(sol, x)
            dy = sol.derivative(x)
            return dy * dy + y * y * math.sqrt(y) / math.sqrt(x)

        return _integrate_rule(f, self.config, lower, sol)

    def slope(self, sol: EvaluableSolution, lower: float = 0.0) -> float:
        """∫ y^(3/2) / sqrt(x) dx，精确解为 B"""

        def f(x: float) -> float:
            y = _y(sol, x)
            return y * math.sqrt(y) / math.sqrt(x)

        return _integrate_rule(f, self.config, lower, sol)

    def by_parts_residual(self, sol: EvaluableSolution, b_input: float) -> float:
        """
        ∫ y y'' dx 分部积分为 B - ∫ (y')^2，与 ∫ y^(5/2)/sqrt(x) 比较

        Returns:
            float: 相对残差
        """
        by_parts = b_input - self.kinetic(sol)
        direct = self.potential(sol)
        residual = (by_parts - direct) / direct
        self.logger.debug(f"分部积分 {by_parts!r}，直接积分 {direct!r}，相对残差 {residual:.3e}")
        return residual

    @log_function_call
    def report(self, sol: EvaluableSolution, b_input: float) -> SumRuleReport:
        """
        计算全部求和规则，单条规则失败时记录在 failures 中

        Args:
            sol: 可求值的解
            b_input: 解中使用的 B

        Returns:
            SumRuleReport: 求和规则报告
        """
        failures: Dict[str, str] = {}

        def attempt(name: str, rule: Callable[[], object]):
            try:
                return rule()
            except QuadratureError as e:
                failures[name] = str(e)
                self.logger.warning(f"求和规则 {name} 未达到精度: {e}")
                return e.estimate
            except ThomasFermiError as e:
                failures[name] = str(e)
                self.logger.error(f"求和规则 {name} 计算失败: {e}")
                return None

        norm = attempt("rule_norm", lambda: self.norm(sol))
        balance = attempt("rule_balance", lambda: self.balance(sol))
        energy = attempt("rule_energy", lambda: self.energy(sol))
        slope = attempt("rule_slope", lambda: self.slope(sol))

        lhs, rhs = balance if isinstance(balance, tuple) else (None, None)
        pct = fractional_error_pct(b_input, energy) if energy is not None else None
        return SumRuleReport(norm, lhs, rhs, energy, slope, b_input, pct, failures)


def sum_rule_norm(sol: EvaluableSolution, cfg: Optional[QuadratureConfig] = None, lower: float = 0.0) -> float:
    return SumRuleEvaluator(cfg).norm(sol, lower)


def sum_rule_balance(
    sol: EvaluableSolution, cfg: Optional[QuadratureConfig] = None, lower: float = 0.0
) -> Tuple[float, float]:
    return SumRuleEvaluator(cfg).balance(sol, lower)


def sum_rule_energy(sol: EvaluableSolution, cfg: Optional[QuadratureConfig] = None, lower: float = 0.0) -> float:
    return SumRuleEvaluator(cfg).energy(sol, lower)


def sum_rule_slope(sol: EvaluableSolution, cfg: Optional[QuadratureConfig] = None, lower: float = 0.0) -> float:
    return SumRuleEvaluator(cfg).slope(sol, lower)


def by_parts_residual(sol: EvaluableSolution, b_input: float, cfg: Optional[QuadratureConfig] = None) -> float:
    return SumRuleEvaluator(cfg).by_parts_residual(sol, b_input)


def consistency_report(
    sol: EvaluableSolution, b_input: float, cfg: Optional[QuadratureConfig] = None
) -> SumRuleReport:
    """以能量型求和规则检验 B 的自洽性"""
    return SumRuleEvaluator(cfg).report(sol, b_input)
