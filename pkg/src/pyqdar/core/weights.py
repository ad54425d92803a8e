"""
自加权 w_t = (1 + Σ_{i=1}^{d}|y_{t-i}|³)^{-1}
"""

from __future__ import annotations

import numpy as np

from .quantile import lag_matrix
from .types import SeriesSample, WeightKind, WeightScheme


def self_weights(
    series: SeriesSample,
    p: int,
    scheme: WeightScheme | None = None,
    start: int | None = None,
) -> np.ndarray:
    """
    计算自加权向量

    权重只依赖 t 之前的观测。结果按 (kind, 深度, start) 缓存在 series 上。

    Args:
        series: 观测序列
        p: 拟合阶数
        scheme: 加权方案，默认三次自加权；scheme.order 给出分母深度 d（默认 p）
        start: 首个响应之前的观测数（默认 max(p, d)）

    Returns:
        t = start+1..n 上的权重（只读数组）

    Example:
        >>> s = SeriesSample([1.0, 2.0, 3.0])
        >>> self_weights(s, 2)
        array([0.1])
    """
    scheme = scheme or WeightScheme()
    depth = scheme.depth(p)
    if depth < 1:
        raise ValueError(f"weight depth must be >= 1, got {depth}")
    start = max(p, depth) if start is None else start
    if series.n <= start:
        raise ValueError(f"series of length {series.n} has no rows after start {start}")

    key = (scheme.kind, depth, start)
    cached = series._weight_cache.get(key)
    if cached is not None:
        return cached

    m = series.n - start
    if scheme.kind is WeightKind.UNIT:
        w = np.ones(m)
    else:
        _, X = lag_matrix(series.values, depth, start)
        w = 1.0 / (1.0 + np.sum(np.abs(X) ** 3, axis=1))
    w.setflags(write=False)
    series._weight_cache[key] = w
    return w
