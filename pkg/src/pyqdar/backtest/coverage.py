"""
VaR 回测检验

cc_test: Christoffersen 条件覆盖似然比检验 LR_cc = LR_uc + LR_ind ~ χ²(2)
dq_test: Engle–Manganelli 动态分位检验，(H_t − τ) 对 [1, H_{t−1..t−L}, VaR_t] 回归的 Wald 统计量
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats
from scipy.special import xlogy

from ..config import CC_MIN_LENGTH, DQ_COND_LIMIT, DQ_LAGS, DQ_RIDGE_SCALE
from ..errors import RankDeficientError
from .rolling import HitSequence


class CcResult(NamedTuple):
    stat: float
    pvalue: float
    lr_uc: float
    lr_ind: float
    df: int
    degenerate: bool
    pvalue_uc: float
    pvalue_ind: float


class DqResult(NamedTuple):
    stat: float
    pvalue: float
    df: int
    coefficients: np.ndarray
    ridge: float


def _bernoulli_loglik(zeros: float, ones: float, prob: float) -> float:
    return float(xlogy(zeros, 1 - prob) + xlogy(ones, prob))


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def kupiec_uc(hits: np.ndarray, tau: float) -> float:
    """无条件覆盖 LR_uc，空项按 0·log0 = 0"""
    m = hits.size
    x = float(hits.sum())
    pi_hat = x / m
    return -2.0 * (_bernoulli_loglik(m - x, x, tau) - _bernoulli_loglik(m - x, x, pi_hat))


def christoffersen_ind(hits: np.ndarray) -> float:
    """一阶 Markov 独立性 LR_ind"""
    prev, curr = hits[:-1], hits[1:]
    n00 = float(np.sum(~prev & ~curr))
    n01 = float(np.sum(~prev & curr))
    n10 = float(np.sum(prev & ~curr))
    n11 = float(np.sum(prev & curr))
    pi01 = _ratio(n01, n00 + n01)
    pi11 = _ratio(n11, n10 + n11)
    pi = _ratio(n01 + n11, n00 + n01 + n10 + n11)
    restricted = _bernoulli_loglik(n00 + n10, n01 + n11, pi)
    markov = _bernoulli_loglik(n00, n01, pi01) + _bernoulli_loglik(n10, n11, pi11)
    return max(-2.0 * (restricted - markov), 0.0)


def _unpack(hits: HitSequence | ArrayLike, tau: float | None) -> tuple[np.ndarray, float]:
    if isinstance(hits, HitSequence):
        return hits.hits, hits.tau if tau is None else tau
    if tau is None:
        raise ValueError("tau is required when hits is a plain array")
    return np.asarray(hits, dtype=bool), tau


def cc_test(hits: HitSequence | ArrayLike, tau: float | None = None) -> CcResult:
    """
    条件覆盖检验

    所有命中相同时 LR_ind 无法识别：返回 LR_uc 与 1 自由度的 p 值，并标记 degenerate。

    Args:
        hits: HitSequence 或布尔命中数组
        tau: 分位水平（hits 为数组时必填）

    Returns:
        CcResult(stat, pvalue, lr_uc, lr_ind, df, degenerate, pvalue_uc, pvalue_ind)

    Example:
        >>> cc_test(np.zeros(100, dtype=bool), 0.05).stat
        10.259...
    """
    h, tau = _unpack(hits, tau)
    if h.size < CC_MIN_LENGTH:
        raise ValueError(f"cc_test needs at least {CC_MIN_LENGTH} hits, got {h.size}")
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must be in range (0, 1), got {tau}")

    lr_uc = kupiec_uc(h, tau)
    p_uc = float(stats.chi2.sf(lr_uc, 1))
    if h.all() or not h.any():
        return CcResult(lr_uc, p_uc, lr_uc, 0.0, 1, True, p_uc, 1.0)

    lr_ind = christoffersen_ind(h)
    stat = lr_uc + lr_ind
    return CcResult(
        stat=stat,
        pvalue=float(stats.chi2.sf(stat, 2)),
        lr_uc=lr_uc,
        lr_ind=lr_ind,
        df=2,
        degenerate=False,
        pvalue_uc=p_uc,
        pvalue_ind=float(stats.chi2.sf(lr_ind, 1)),
    )


def dq_regression(centered_hits: np.ndarray, design: np.ndarray, tau: float) -> DqResult:
    """
    DQ 检验的 Wald 核心：β̂ = (X'X)⁻¹X'(H − τ)，DQ = β̂'X'Xβ̂ / (τ(1−τ))

    X'X 条件数超过 1e12 时加岭 1e-10·trace·I；自由度为 rank(X)。

    Raises:
        RankDeficientError: 加岭后仍奇异
    """
    y = np.asarray(centered_hits, dtype=float)
    X = np.asarray(design, dtype=float)
    xtx = X.T @ X
    ridge = 0.0
    if np.linalg.cond(xtx) > DQ_COND_LIMIT:
        ridge = DQ_RIDGE_SCALE * float(np.trace(xtx))
        xtx = xtx + ridge * np.eye(xtx.shape[0])
    try:
        if not np.all(np.isfinite(xtx)) or np.trace(xtx) <= 0:
            raise np.linalg.LinAlgError("empty design")
        beta = np.linalg.solve(xtx, X.T @ y)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(f"DQ design is rank deficient: {exc}") from None
    stat = max(float(beta @ xtx @ beta) / (tau * (1 - tau)), 0.0)
    df = int(np.linalg.matrix_rank(X))
    return DqResult(stat, float(stats.chi2.sf(stat, df)), df, beta, ridge)


def dq_design(hits: np.ndarray, forecasts: np.ndarray, n_lags: int = DQ_LAGS) -> np.ndarray:
    """第 t 行为 [1, H_{t−1}, ..., H_{t−L}, VaR_t]，t = L..m−1"""
    m = hits.size
    h = hits.astype(float)
    lags = [h[n_lags - k : m - k] for k in range(1, n_lags + 1)]
    return np.column_stack([np.ones(m - n_lags), *lags, forecasts[n_lags:]])


def dq_test(hits: HitSequence, n_lags: int = DQ_LAGS) -> DqResult:
    """
    动态分位检验

    零假设下全部系数（含 VaR 预测的系数）在中心化后为 0。

    Args:
        hits: 带预测值的命中序列
        n_lags: 滞后命中个数

    Returns:
        DqResult(stat, pvalue, df, coefficients, ridge)
    """
    if n_lags < 1:
        raise ValueError(f"n_lags must be >= 1, got {n_lags}")
    m = hits.count
    if m <= n_lags + 10:
        raise ValueError(f"dq_test needs more than {n_lags + 10} hits, got {m}")
    h = hits.hits
    design = dq_design(h, hits.forecasts, n_lags)
    centered = h[n_lags:].astype(float) - hits.tau
    return dq_regression(centered, design, hits.tau)
