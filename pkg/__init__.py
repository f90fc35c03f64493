"""Thomas-Fermi 方程的数值解、小x级数、有理近似与求和规则"""

from approximants import ApproximantKind, RationalApproximant, dc_check, find_crossing
from config import AppConfig, get_config
from constants import APP_NAME, APP_VERSION, B_CANONICAL
from ode_solver import TfIntegrator, bounded_solution, shoot
from quadrature import consistency_report

__version__ = APP_VERSION
__all__ = [
    'ApproximantKind', 'RationalApproximant', 'dc_check', 'find_crossing',
    'AppConfig', 'get_config', 'TfIntegrator', 'bounded_solution', 'shoot',
    'consistency_report', 'APP_NAME', 'APP_VERSION', 'B_CANONICAL',
]
