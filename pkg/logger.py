"""日志配置模块

日志一律写标准错误或日志文件，标准输出只留给数据。
"""
import functools
import logging
import logging.handlers
import sys
import time
from pathlib import Path
from typing import Callable, Optional, TypeVar

from constants import LOG_FORMAT, LOG_DATE_FORMAT, APP_NAME
from exceptions import ThomasFermiError

F = TypeVar("F", bound=Callable)

# 计算日志按最长 10MB 轮转
LOG_MAX_BYTES = 10 * 1024 * 1024
LOG_BACKUP_COUNT = 5


def _level(level: str) -> int:
    value = logging.getLevelName(level.upper())
    return value if isinstance(value, int) else logging.WARNING


def setup_logger(
    name: str = APP_NAME,
    level: str = "WARNING",
    log_file: Optional[Path] = None,
    console_output: bool = True,
) -> logging.Logger:
    """
    配置应用日志记录器

    Args:
        name: 日志记录器名称，模块内的记录器都挂在它下面
        level: 日志级别名，无法识别时按 WARNING 处理
        log_file: 日志文件路径，None 表示只写标准错误
        console_output: 是否写标准错误

    Returns:
        logging.Logger: 配置好的日志记录器
    """
    root = logging.getLogger(name)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    log_level = _level(level)
    root.setLevel(log_level)
    formatter = logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT)

    handlers = []
    if console_output:
        handlers.append(logging.StreamHandler(sys.stderr))
    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.handlers.RotatingFileHandler(
            log_file, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUP_COUNT, encoding='utf-8'
        ))
    for handler in handlers:
        handler.setLevel(log_level)
        handler.setFormatter(formatter)
        root.addHandler(handler)

    root.propagate = False
    return root


def get_logger(name: str) -> logging.Logger:
    """模块级记录器，挂在应用记录器之下"""
    return logging.getLogger(f"{APP_NAME}.{name}")


class LoggerMixin:
    """为求解器类提供按类名命名的日志记录器"""

    @property
    def logger(self) -> logging.Logger:
        return get_logger(self.__class__.__name__)


def log_function_call(func: F) -> F:
    """
    装饰器：在 DEBUG 级别记录耗时较长的计算入口

    计算错误（ThomasFermiError）只记 WARNING 后继续抛出，交给调用方决定如何处理；
    其他异常视为程序错误，记 ERROR。
    """
    logger = get_logger(f"{func.__module__}.{func.__qualname__}")

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        started = time.perf_counter()
        logger.debug(f"开始计算: {func.__qualname__}")
        try:
            result = func(*args, **kwargs)
        except ThomasFermiError as e:
            logger.warning(f"{func.__qualname__} 计算失败: {e}")
            raise
        except Exception as e:
            logger.error(f"{func.__qualname__} 意外错误: {e}")
            raise
        logger.debug(f"{func.__qualname__} 完成，耗时 {time.perf_counter() - started:.3f}s")
        return result

    return wrapper  # type: ignore[return-value]
