"""配置管理模块"""
import os
from dataclasses import dataclass, field

from constants import (
    DEFAULT_X_START, DEFAULT_STEP, DEFAULT_X_MAX, DEFAULT_SEED_TWICE_POWER,
    DEFAULT_REL_TOL, DEFAULT_SPLIT, DEFAULT_MAX_DEPTH,
)
from exceptions import ConfigError
from series import HalfPower

TAIL_MODELS = ("corrected", "singular")


@dataclass(frozen=True)
class IntegratorConfig:
    """RK4积分器配置"""

    x_start: float = DEFAULT_X_START  # 级数与RK4的交接点
    h: float = DEFAULT_STEP
    x_max: float = DEFAULT_X_MAX
    series_order: HalfPower = HalfPower(DEFAULT_SEED_TWICE_POWER)  # 种子级数阶数
    tail_model: str = "corrected"

    def __post_init__(self):
        if not (0.0 < self.x_start < self.x_max):
            raise ConfigError(f"要求 0 < x_start < x_max，实际 x_start={self.x_start}, x_max={self.x_max}")
        if not (0.0 < self.h < self.x_start):
            raise ConfigError(f"要求 0 < h < x_start，实际 h={self.h}")
        if not isinstance(self.series_order, HalfPower) or self.series_order.twice_power < 2:
            raise ConfigError(f"种子级数阶数无效: {self.series_order}")
        if self.tail_model not in TAIL_MODELS:
            raise ConfigError(f"未知的尾部模型: {self.tail_model}")


@dataclass(frozen=True)
class QuadratureConfig:
    """反常积分配置"""

    rel_tol: float = DEFAULT_REL_TOL
    split: float = DEFAULT_SPLIT  # 换元区与尾部映射区的分界
    max_depth: int = DEFAULT_MAX_DEPTH
    min_depth: int = 4

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise ConfigError(f"rel_tol 必须在 (0, 1) 内: {self.rel_tol}")
        if self.split <= 0.0:
            raise ConfigError(f"split 必须为正: {self.split}")
        if not (0 <= self.min_depth < self.max_depth):
            raise ConfigError(f"递归深度设置无效: min={self.min_depth}, max={self.max_depth}")


@dataclass(frozen=True)
class DcTolerances:
    """动力学一致性各项性质的容差"""

    initial: float = 1e-12  # (i)
    monotone: float = 0.0  # (ii)
    asymptotic: float = 0.5  # (iii)
    structural: float = 0.0  # (iv)
    small_x: float = 1e-4  # (v)

    def __post_init__(self):
        for name in ("initial", "monotone", "asymptotic", "structural", "small_x"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"容差不能为负: {name}={getattr(self, name)}")


@dataclass
class AppConfig:
    """应用程序配置类"""

    log_level: str = "WARNING"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    dc_tolerances: DcTolerances = field(default_factory=DcTolerances)


def get_config() -> AppConfig:
    """获取配置实例，环境变量可覆盖默认值"""
    config = AppConfig()

    if log_level := os.getenv("TF_LOG_LEVEL"):
        config.log_level = log_level

    integrator_overrides = {}
    if x_max := os.getenv("TF_X_MAX"):
        try:
            integrator_overrides["x_max"] = float(x_max)
        except ValueError:
            pass

    if step := os.getenv("TF_STEP"):
        try:
            integrator_overrides["h"] = float(step)
        except ValueError:
            pass

    if integrator_overrides:
        try:
            config.integrator = IntegratorConfig(**integrator_overrides)
        except ConfigError:
            pass

    if rel_tol := os.getenv("TF_REL_TOL"):
        try:
            config.quadrature = QuadratureConfig(rel_tol=float(rel_tol))
        except (ValueError, ConfigError):
            pass

    return config
