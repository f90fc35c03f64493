"""自定义异常类"""
from typing import Optional


class ThomasFermiError(Exception):
    """基础异常类"""
    pass


class ConfigError(ThomasFermiError):
    """配置相关异常"""
    pass


class DomainError(ThomasFermiError, ValueError):
    """自变量超出定义域"""
    pass


class PreconditionError(ThomasFermiError):
    """前置条件不满足"""
    pass


class SeriesError(ThomasFermiError):
    """级数运算异常"""
    pass


class IntegrationError(ThomasFermiError):
    """常微分方程积分异常"""
    pass


class BracketError(ThomasFermiError):
    """打靶区间无效"""

    def __init__(self, message: str, endpoint: Optional[str] = None, status: Optional[str] = None):
        super().__init__(message)
        self.endpoint = endpoint
        self.status = status


class QuadratureError(ThomasFermiError):
    """数值积分未达到精度"""

    def __init__(self, message: str, estimate: float, accurate: bool = False):
        super().__init__(message)
        self.estimate = estimate
        self.accurate = accurate


class ApproximantError(ThomasFermiError):
    """有理近似解异常"""
    pass


class OutputError(ThomasFermiError):
    """输出文件写入异常"""
    pass
