"""
默认配置与运行配置

所有默认常量集中在这里，CLI 和各模块从这里读取。
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

from packaging.version import Version

# ========== 配置 ==========
SPEC_VERSION = "1.0"

BURN_IN = 500
N_STARTS = 8
STUDY_STARTS = 4
GRAD_FLOOR = 1e-8
REL_TOL = 1e-9
X_ATOL = 1e-6
MAX_ITER_PER_ORDER = 500
MIN_ROWS_PER_PARAM = 10

TAU_LOW = 0.001
TAU_HIGH = 0.999
BANDWIDTH_RULE = "hall-sheather"
BANDWIDTH_ALPHA = 0.05
NEAR_MEDIAN = (0.45, 0.55)
FMAX_IQR_FACTOR = 10.0
RIDGE_SCALE = 1e-8

BIC_LEVELS = 9
P_MAX_CLI = 10
P_MAX_STUDY = 5

NULL_DRAWS = 10000
NULL_BLOCK = 2000
QACF_LAGS = 6

DQ_LAGS = 4
DQ_RIDGE_SCALE = 1e-10
DQ_COND_LIMIT = 1e12
CC_MIN_LENGTH = 20

MC_DRAWS = 100_000
MC_MIN_DRAWS = 1000
STATIONARITY_MARGIN = 2.0

BACKTEST_LEVELS = (0.05, 0.10, 0.90, 0.95)
DEFAULT_TAU = 0.05
REGION_GRID = 20
DEFAULT_SEED = 20240501
# ==========================


@dataclass
class RunConfig:
    """
    CLI 运行配置（写入每个产物，可用 --config 重放）

    Args:
        command: 子命令名
        input: 输入 CSV 路径
        output_dir: 产物目录
        tau: 单个分位水平
        tau_grid: 分位水平网格
        order: 阶数 p
        p_max: BIC 扫描的最大阶数
        weights: "cubic" 或 "unit"
        bandwidth: "bofinger" 或 "hall-sheather"
        seed: 主随机种子
        reps: 重复次数
        workers: 并行进程/线程数
        design: 模拟设计名
        extra: 子命令专属参数
    """

    command: str
    input: str | None = None
    output_dir: str = "out"
    tau: float | None = None
    tau_grid: list[float] | None = None
    order: int | None = None
    p_max: int = P_MAX_CLI
    weights: str = "cubic"
    bandwidth: str = BANDWIDTH_RULE
    seed: int = DEFAULT_SEED
    reps: int = 1
    workers: int = 1
    design: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


def check_spec_version(found: str) -> None:
    """
    检查产物的 spec_version 是否可被当前版本读取

    Raises:
        ValueError: 主版本号不同或产物版本更新
    """
    current, other = Version(SPEC_VERSION), Version(str(found))
    if other.major != current.major or other > current:
        raise ValueError(
            f"artifact spec_version {found} is not compatible with {SPEC_VERSION}"
        )
