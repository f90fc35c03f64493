"""常量定义"""

# 应用信息
APP_NAME = "Thomas-Fermi DC"
APP_VERSION = "0.1.0"

# 日志配置
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# 初始斜率 y'(0) = -B 的标准值
B_CANONICAL = 1.588071022611375

# 奇异解 y_s = 144 / x^3
SINGULAR_COEFFICIENT = 144.0

# 大x渐近修正指数 r = (sqrt(73) - 7) / 2
ASYMPTOTIC_CORRECTION_EXPONENT = (73 ** 0.5 - 7.0) / 2.0

# 积分器默认值
DEFAULT_X_START = 0.05
DEFAULT_STEP = 1e-3
DEFAULT_X_MAX = 60.0
DEFAULT_SEED_TWICE_POWER = 16  # x^8
REFERENCE_TWICE_POWER = 9  # x^(9/2)

# 打靶默认区间
DEFAULT_SHOOT_LO = -1.7
DEFAULT_SHOOT_HI = -1.5
DEFAULT_SHOOT_TOL = 1e-10

# 积分默认值
DEFAULT_REL_TOL = 1e-9
DEFAULT_SPLIT = 1.0
DEFAULT_MAX_DEPTH = 50

# 参考值: x, 数值解, 近似解1, 近似解2
REFERENCE_TABLE = (
    (0.0, 1.0000, 1.0000, 1.0000),
    (0.5, 0.6070, 0.5571, 0.6102),
    (1.0, 0.4240, 0.3853, 0.3964),
    (2.0, 0.2430, 0.2363, 0.1817),
    (4.0, 0.1840, 0.1283, 0.0578),
    (5.0, 0.0789, 0.1020, 0.0378),
    (10.0, 0.0243, 0.0420, 0.0093),
    (25.0, 0.0035, 0.0067, 0.0013),
    (40.0, 0.0011, 0.0020, 0.0005),
)
# x = 4.0 处的 0.1840 与单调性矛盾（疑似抄录错误）
REFERENCE_TABLE_ANOMALIES = {4.0: "与 y(2.0)=0.2430、y(5.0)=0.0789 之间的单调性矛盾"}
# 近似解列的印刷值与四舍五入不符的格点: (x, 列) -> 实际四舍五入值
# y_a1(1.0) = 0.385354，印作 0.3853；截断也不成立（x = 4.0 处 0.128259 印作 0.1283）
REFERENCE_ROUNDING_ANOMALIES = {(1.0, "ansatz1"): 0.3854}
TABLE_FLAG_THRESHOLD = 0.002

# table --grid 的对数网格范围
GRID_X_MIN = 0.01
GRID_X_MAX = 100.0

# 能量型求和规则的文献值
REFERENCE_B1 = 1.584744
REFERENCE_B2 = 1.592931
REFERENCE_B_INPUT = 1.588071
REFERENCE_E1_PCT = 0.21
REFERENCE_E2_PCT = -0.27
