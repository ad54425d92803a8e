"""
BIC 阶数选择

BIC_τ(p) = 2(n − p_max)·log L_n(θ̂^p_τ) + (2p + 1)·log(n − p_max)
BIC(p)   = K⁻¹ Σ_k BIC_{τ_k}(p)，τ_k = k/(K+1)

所有阶数共用同一样本 t = p_max+1..n 与 p_max 深度的自加权。
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd
from rich.console import Console

from ..config import BIC_LEVELS, P_MAX_CLI
from ..core import SeriesSample, WeightScheme
from ..errors import QdarError
from ..estimate import FitOptions, fit
from ..utils import derive_seed

console = Console()


def bic_formula(loss: float, p: int, n_eff: int) -> tuple[float, bool]:
    """
    按公式计算 BIC

    Returns:
        (BIC 值, 是否退化)；n_eff = 1 时惩罚项为 0，标记退化
    """
    if n_eff < 1:
        raise ValueError(f"effective sample size must be >= 1, got {n_eff}")
    degenerate = n_eff == 1 or loss <= 0
    fit_term = -math.inf if loss <= 0 else 2 * n_eff * math.log(loss)
    return fit_term + (2 * p + 1) * math.log(n_eff), degenerate


def _level_options(opts: FitOptions | None, seed: int | None) -> FitOptions:
    opts = opts or FitOptions()
    return opts.but(covariance=False, warn_near_median=False, require_convergence=False, seed=seed)


def _check_orders(p: int, p_max: int) -> None:
    if p_max < 1:
        raise ValueError(f"p_max must be >= 1, got {p_max}")
    if not 1 <= p <= p_max:
        raise ValueError(f"p must be in range [1, {p_max}], got {p}")


def level_loss(
    series: SeriesSample,
    tau: float,
    p: int,
    p_max: int,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
) -> float:
    """共同样本上的 L_n(θ̂^p_τ) = (n − p_max)⁻¹ Σ w_t ρ_τ(η̂_t)"""
    _check_orders(p, p_max)
    scheme = (scheme or WeightScheme()).with_order(p_max)
    result = fit(series, tau, p, scheme, _level_options(opts, opts.seed if opts else None), start=p_max)
    return result.loss


def bic_at_level(
    series: SeriesSample,
    tau: float,
    p: int,
    p_max: int,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
) -> float:
    """
    单一分位水平上的 BIC_τ(p)

    Args:
        series: 观测序列
        tau: 分位水平
        p: 候选阶数，1 ≤ p ≤ p_max
        p_max: 最大阶数（决定共同样本和权重深度）
        scheme: 加权方案种类（深度被替换为 p_max）
        opts: 拟合选项

    Returns:
        BIC 值
    """
    loss = level_loss(series, tau, p, p_max, scheme, opts)
    value, degenerate = bic_formula(loss, p, series.n - p_max)
    if degenerate:
        console.print(f"[yellow]⚠ BIC 退化: n − p_max = {series.n - p_max}, loss = {loss:.3g}[/yellow]")
    return value


@dataclass
class BicTable:
    """
    Args:
        p_max: 扫描的最大阶数
        levels: τ_1..τ_K
        per_level: (K, p_max) 的 BIC_τ(p)，被丢弃的水平整行为 NaN
        used: 参与平均的水平
        combined: 长度 p_max 的 BIC(p)
        combined_alt: 先平均 log-loss 再乘 2(n − p_max) 的读法
        chosen: p̂
        n_eff: n − p_max
        degenerate: 是否退化
    """

    p_max: int
    levels: np.ndarray
    per_level: np.ndarray
    losses: np.ndarray
    used: np.ndarray
    combined: np.ndarray
    combined_alt: np.ndarray
    chosen: int
    n_eff: int
    degenerate: bool = False

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.p_max + 1)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"p": self.orders})
        for k, tau in enumerate(self.levels):
            frame[f"tau_{tau:.4g}"] = self.per_level[k]
        frame["combined"] = self.combined
        return frame

    def to_dict(self) -> dict[str, Any]:
        return {
            "p_max": self.p_max,
            "levels": self.levels.tolist(),
            "used_levels": self.levels[self.used].tolist(),
            "combined": self.combined.tolist(),
            "chosen": self.chosen,
            "n_eff": self.n_eff,
            "degenerate": self.degenerate,
        }


def level_grid(K: int) -> np.ndarray:
    """τ_k = k/(K+1)，k = 1..K"""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return np.arange(1, K + 1) / (K + 1)


def select_order(
    series: SeriesSample,
    K: int = BIC_LEVELS,
    p_max: int = P_MAX_CLI,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
    workers: int = 1,
) -> BicTable:
    """
    组合 BIC 选阶

    (水平 × 阶数) 网格并行拟合，每格种子由 (opts.seed, k, p) 派生。
    任一阶数拟合失败的水平整体从平均中剔除。平局选较小的 p。

    Args:
        series: 观测序列
        K: 水平个数
        p_max: 最大阶数
        scheme: 加权方案种类
        opts: 拟合选项
        workers: 并行线程数

    Returns:
        BicTable

    Raises:
        QdarError: 所有水平都失败
    """
    _check_orders(1, p_max)
    levels = level_grid(K)
    scheme = (scheme or WeightScheme()).with_order(p_max)
    base_seed = opts.seed if opts else None
    n_eff = series.n - p_max

    cells = [(k, p) for k in range(K) for p in range(1, p_max + 1)]

    def run(cell: tuple[int, int]) -> float:
        k, p = cell
        seed = int(derive_seed(base_seed, k, p).generate_state(1)[0])
        try:
            return fit(series, float(levels[k]), p, scheme, _level_options(opts, seed), start=p_max).loss
        except (QdarError, ValueError) as exc:
            console.print(f"[red]✗ τ={levels[k]:.3g}, p={p} 拟合失败: {exc}[/red]")
            return math.nan

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        flat = list(executor.map(run, cells))

    losses = np.array(flat).reshape(K, p_max)
    used = np.all(np.isfinite(losses), axis=1)
    if not used.any():
        raise QdarError("every level failed during order selection")
    for k in np.flatnonzero(~used):
        console.print(f"[yellow]⚠ 丢弃水平 τ={levels[k]:.3g}（存在失败的阶数）[/yellow]")

    per_level = np.full((K, p_max), np.nan)
    degenerate = False
    for k in np.flatnonzero(used):
        for j, p in enumerate(range(1, p_max + 1)):
            per_level[k, j], flag = bic_formula(losses[k, j], p, n_eff)
            degenerate |= flag
    if degenerate:
        console.print(f"[yellow]⚠ BIC 退化: n − p_max = {n_eff}[/yellow]")

    orders = np.arange(1, p_max + 1)
    combined = per_level[used].mean(axis=0)
    with np.errstate(divide="ignore"):
        combined_alt = 2 * n_eff * np.log(losses[used]).mean(axis=0) + (2 * orders + 1) * np.log(n_eff)
    chosen = int(np.argmin(combined)) + 1

    console.print(f"[green]✓ 组合 BIC 选阶: p̂ = {chosen}（{int(used.sum())}/{K} 个水平）[/green]")
    return BicTable(
        p_max=p_max,
        levels=levels,
        per_level=per_level,
        losses=losses,
        used=used,
        combined=combined,
        combined_alt=combined_alt,
        chosen=chosen,
        n_eff=n_eff,
        degenerate=degenerate,
    )
