"""
拟合选项与结果类型
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ..config import (
    BANDWIDTH_ALPHA,
    GRAD_FLOOR,
    MAX_ITER_PER_ORDER,
    N_STARTS,
    REL_TOL,
    X_ATOL,
)
from ..core import SeriesSample, ThetaTau, WeightScheme, cond_quantile_path, lag_matrix
from .bandwidth import BandwidthRule


@dataclass(frozen=True)
class FitOptions:
    """
    优化器与推断选项

    Args:
        n_starts: 起点个数（第 1 个为线性分位回归起点，其余为随机扰动）
        max_iter: 每个起点的最大迭代数，None 表示 500·p
        rel_tol: 目标函数相对变化停止阈值
        xatol: 单纯形参数变化停止阈值
        grad_floor: |h_t| 下限
        bandwidth: 协方差估计使用的带宽规则
        alpha: Hall–Sheather 显著性水平
        polish: 是否用拟牛顿法（次梯度）精修最优单纯形解
        covariance: 是否计算渐近协方差（需要 τ±h 两次额外拟合）
        fix_beta_zero: 约束 β ≡ 0（QAR 特例）
        require_convergence: 所有起点都未收敛时是否抛出 DidNotConvergeError
        warn_near_median: τ ∈ (0.45, 0.55) 时是否打印提示
        seed: 随机扰动起点的种子
        workers: 起点并行线程数
    """

    n_starts: int = N_STARTS
    max_iter: int | None = None
    rel_tol: float = REL_TOL
    xatol: float = X_ATOL
    grad_floor: float = GRAD_FLOOR
    bandwidth: BandwidthRule = BandwidthRule.HALL_SHEATHER
    alpha: float = BANDWIDTH_ALPHA
    polish: bool = True
    covariance: bool = True
    fix_beta_zero: bool = False
    require_convergence: bool = True
    warn_near_median: bool = True
    seed: int | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_starts < 1:
            raise ValueError(f"n_starts must be >= 1, got {self.n_starts}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        object.__setattr__(self, "bandwidth", BandwidthRule.parse(self.bandwidth))

    def iterations(self, p: int) -> int:
        return self.max_iter if self.max_iter is not None else MAX_ITER_PER_ORDER * p

    def but(self, **changes: Any) -> FitOptions:
        return replace(self, **changes)


@dataclass(frozen=True)
class BandwidthInfo:
    rule: BandwidthRule
    value: float

    def to_dict(self) -> dict[str, Any]:
        return {"rule": self.rule.value, "value": self.value}


@dataclass
class FitResult:
    """
    单一分位水平的自加权条件分位估计结果

    covariance 为 Σ̂(τ)/n，asd_j = √covariance_jj；
    omega0 / omega1 为 (n − start)⁻¹ 归一化的 Ω̂₀、Ω̂₁。
    """

    theta: ThetaTau
    loss: float
    converged: bool
    starts_tried: int
    weights: WeightScheme
    n: int
    start: int
    seed: int | None = None
    start_points: list[list[float]] = field(default_factory=list)
    fix_beta_zero: bool = False
    covariance: np.ndarray | None = None
    asd: np.ndarray | None = None
    bandwidth: BandwidthInfo | None = None
    omega0: np.ndarray | None = None
    omega1: np.ndarray | None = None
    ridge: float = 0.0
    density: np.ndarray | None = None

    @property
    def tau(self) -> float:
        return self.theta.tau

    @property
    def p(self) -> int:
        return self.theta.p

    def rows(self, series: SeriesSample) -> tuple[np.ndarray, np.ndarray]:
        """与本次拟合相同样本窗口的 (y, X)"""
        return lag_matrix(series.values, self.p, self.start)

    def fitted(self, series: SeriesSample) -> np.ndarray:
        _, X = self.rows(series)
        return cond_quantile_path(self.theta, X)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tau": self.tau,
            "p": self.p,
            "theta": self.theta.to_dict(),
            "asd": None if self.asd is None else self.asd.tolist(),
            "covariance": None if self.covariance is None else self.covariance.tolist(),
            "loss": self.loss,
            "bandwidth": None if self.bandwidth is None else self.bandwidth.to_dict(),
            "converged": self.converged,
            "seed": self.seed,
            "starts_tried": self.starts_tried,
            "weights": {"kind": self.weights.kind.value, "order": self.weights.order},
            "start_points": self.start_points,
            "fix_beta_zero": self.fix_beta_zero,
            "ridge": self.ridge,
            "n": self.n,
            "start": self.start,
        }
