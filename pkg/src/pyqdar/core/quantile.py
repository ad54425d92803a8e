"""
条件分位函数 q_t(θ_τ) 及其导数

滞后约定：最近优先，lags[0] = y_{t-1}, ..., lags[p-1] = y_{t-p}。
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from ..config import GRAD_FLOOR
from .transforms import s_q
from .types import SeriesSample, ThetaTau


def lag_matrix(values: ArrayLike, p: int, start: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    构造响应与滞后矩阵

    Args:
        values: 序列 y_1..y_n
        p: 滞后阶数
        start: 首个响应之前的观测数（默认 p），响应为 y_{start+1}..y_n

    Returns:
        (y, X)，X[r, i-1] = y_{t-i}，t 为第 r 个响应的时间

    Raises:
        ValueError: start < p 或没有可用行
    """
    values = np.asarray(values, dtype=float)
    start = p if start is None else start
    if p < 1:
        raise ValueError(f"order p must be >= 1, got {p}")
    if start < p:
        raise ValueError(f"start ({start}) must be >= p ({p})")
    n = values.size
    if n <= start:
        raise ValueError(f"series of length {n} has no rows after start {start}")
    X = np.column_stack([values[start - i : n - i] for i in range(1, p + 1)])
    return values[start:], X


def cond_quantile(theta: ThetaTau, lags: ArrayLike) -> float:
    """
    条件分位 Σφ_i·lag_i + S_Q(b + Σβ_j·lag_j²)

    Example:
        >>> theta = ThetaTau(0.25, [-0.2], -0.455, [-0.182])
        >>> round(cond_quantile(theta, [1.0]), 5)
        -0.99812
    """
    lags = np.asarray(lags, dtype=float)
    if lags.shape != (theta.p,):
        raise ValueError(f"lags must have length {theta.p}, got shape {lags.shape}")
    return float(lags @ theta.phi + s_q(theta.b + (lags**2) @ theta.beta))


def cond_quantile_path(theta: ThetaTau, X: np.ndarray) -> np.ndarray:
    """逐行计算条件分位，X 由 lag_matrix 给出"""
    return X @ theta.phi + s_q(theta.b + (X**2) @ theta.beta)


def scale_argument(theta: ThetaTau, X: np.ndarray) -> np.ndarray:
    """h_t = b + Σβ_j·y²_{t-j}"""
    return theta.b + (X**2) @ theta.beta


def cond_quantile_grad(theta: ThetaTau, lags: ArrayLike, floor: float = GRAD_FLOOR) -> np.ndarray:
    """
    条件分位对 θ 的梯度 q̇_t

    |h_t| 在 S_Q 拐点附近用 max(|h_t|, floor) 代替，保证导数有限。

    Args:
        theta: 参数
        lags: 最近优先的 p 个滞后值
        floor: |h_t| 下限，必须为正

    Returns:
        长度 2p+1 的梯度，顺序 (∂φ_1..∂φ_p, ∂b, ∂β_1..∂β_p)
    """
    lags = np.asarray(lags, dtype=float)
    return cond_quantile_jacobian(theta, lags[None, :], floor)[0]


def cond_quantile_jacobian(theta: ThetaTau, X: np.ndarray, floor: float = GRAD_FLOOR) -> np.ndarray:
    """逐行梯度，返回 (m, 2p+1) 矩阵"""
    if floor <= 0:
        raise ValueError(f"floor must be positive, got {floor}")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != theta.p:
        raise ValueError(f"lag matrix must have {theta.p} columns, got shape {X.shape}")
    sq = X**2
    h = theta.b + sq @ theta.beta
    g = 0.5 / np.sqrt(np.maximum(np.abs(h), floor))
    return np.column_stack([X, g, g[:, None] * sq])


def residuals(theta: ThetaTau, series: SeriesSample, start: int | None = None) -> np.ndarray:
    """
    分位残差 η̂_t = y_t − q_t(θ)，t = start+1..n（默认 start = p）
    """
    y, X = lag_matrix(series.values, theta.p, start)
    return y - cond_quantile_path(theta, X)
