"""
多分位水平拟合与重排

各水平独立拟合；重排只作用于拟合/预测的分位值（沿水平方向排序），不改参数。
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from rich.console import Console

from ..core import SeriesSample, WeightScheme, cond_quantile
from ..errors import QdarError
from ..utils import derive_seed
from .fitting import fit
from .result import FitOptions, FitResult

console = Console()


@dataclass
class MultiFit:
    """
    Args:
        levels: 严格递增的分位水平
        fits: 每个水平的 FitResult（失败为 None）
        statuses: 每个水平的状态，"ok" 或错误信息
        fitted: 成功水平的拟合分位矩阵 (K_ok, m)，rearranged 时已沿水平排序
        rearranged: 是否做了重排
    """

    levels: np.ndarray
    fits: list[FitResult | None]
    statuses: list[str]
    fitted: np.ndarray = field(repr=False)
    rearranged: bool

    @property
    def ok(self) -> np.ndarray:
        return np.array([s == "ok" for s in self.statuses])

    @property
    def ok_levels(self) -> np.ndarray:
        return self.levels[self.ok]


def _check_levels(levels: Sequence[float]) -> np.ndarray:
    levels = np.asarray(levels, dtype=float)
    if levels.ndim != 1 or levels.size < 1:
        raise ValueError("levels must be a non-empty vector")
    if np.any(levels <= 0) or np.any(levels >= 1):
        raise ValueError(f"levels must lie in (0, 1), got {levels.tolist()}")
    if np.any(np.diff(levels) <= 0):
        raise ValueError(f"levels must be strictly increasing, got {levels.tolist()}")
    return levels


def fit_levels(
    series: SeriesSample,
    levels: Sequence[float],
    p: int,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
    rearrange: bool = True,
    workers: int = 1,
) -> MultiFit:
    """
    在多个分位水平上拟合

    每个水平的种子由 (opts.seed, k) 派生，结果与线程调度无关。
    单个水平失败时记录状态并继续。

    Args:
        series: 观测序列
        levels: 递增的分位水平
        p: 阶数
        scheme: 加权方案
        opts: 拟合选项
        rearrange: 是否对拟合分位值重排
        workers: 并行线程数

    Returns:
        MultiFit
    """
    levels = _check_levels(levels)
    opts = opts or FitOptions()
    scheme = scheme or WeightScheme()

    def run(k: int) -> tuple[FitResult | None, str]:
        seed = int(derive_seed(opts.seed, k).generate_state(1)[0])
        try:
            return fit(series, float(levels[k]), p, scheme, opts.but(seed=seed)), "ok"
        except (QdarError, ValueError) as exc:
            console.print(f"[red]✗ τ={levels[k]:g} 拟合失败: {exc}[/red]")
            return None, f"error: {exc}"

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        outcomes = list(executor.map(run, range(levels.size)))

    fits = [fit_ for fit_, _ in outcomes]
    statuses = [status for _, status in outcomes]
    good = [f for f in fits if f is not None]
    if good:
        fitted = np.vstack([f.fitted(series) for f in good])
        if rearrange:
            fitted = np.sort(fitted, axis=0)
    else:
        fitted = np.empty((0, 0))
    return MultiFit(levels, fits, statuses, fitted, rearrange)


def forecast_levels(multifit: MultiFit, last_values: np.ndarray) -> np.ndarray:
    """
    各成功水平的一步预测（最近优先的滞后），rearranged 时排序

    Returns:
        长度 K_ok 的预测向量，对应 multifit.ok_levels
    """
    values = np.array(
        [cond_quantile(f.theta, np.asarray(last_values)[: f.p]) for f in multifit.fits if f is not None]
    )
    return np.sort(values) if multifit.rearranged else values
