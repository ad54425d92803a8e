"""
Box–Pierce 型组合检验 Q₁(K)、Q₂(K)、Q(K)

零分布由 z ~ N(0, Π̂) 的 B 次模拟得到，p 值为 z'z 不小于统计量的比例。
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd
from scipy import stats

from ..config import NULL_BLOCK, NULL_DRAWS
from ..utils import make_rng
from .qacf import QacfReport


@dataclass(frozen=True)
class PortmanteauResult:
    K: int
    q1: float
    q2: float
    q: float
    p1: float
    p2: float
    p_comb: float
    B: int
    seed: int | None

    def rejects(self, level: float = 0.05) -> tuple[bool, bool, bool]:
        return self.p1 < level, self.p2 < level, self.p_comb < level

    def to_dict(self) -> dict[str, Any]:
        return {
            "K": self.K,
            "q1": self.q1,
            "q2": self.q2,
            "q": self.q,
            "p1": self.p1,
            "p2": self.p2,
            "p_comb": self.p_comb,
            "B": self.B,
            "seed": self.seed,
        }


def psd_factor(matrix: np.ndarray, method: str = "eigh") -> np.ndarray:
    """
    L 使 L L' = matrix

    method="eigh" 用对称特征分解（负特征值截为 0）；method="cholesky" 在对角线上加
    1e-12·trace/dim 的岭后做 Cholesky 分解，用于半正定但奇异的 Π̂。
    """
    sym = 0.5 * (matrix + matrix.T)
    if method == "eigh":
        vals, vecs = np.linalg.eigh(sym)
        return vecs * np.sqrt(np.clip(vals, 0.0, None))
    if method == "cholesky":
        dim = sym.shape[0]
        ridge = 1e-12 * max(float(np.trace(sym)), 1.0) / dim
        return np.linalg.cholesky(sym + ridge * np.eye(dim))
    raise ValueError(f"method must be eigh or cholesky, got {method!r}")


def portmanteau(
    report: QacfReport,
    n: int | None = None,
    B: int = NULL_DRAWS,
    seed: int | None = None,
    workers: int = 1,
    factorization: str = "eigh",
) -> PortmanteauResult:
    """
    计算 Q₁、Q₂、Q 及其 Monte-Carlo p 值

    抽样按块进行，第 i 块使用由 (seed, i) 派生的随机数，结果与线程数无关。

    Args:
        report: QACF 报告
        n: 样本量，默认 report.n
        B: 零分布抽样次数（≥ 1000）
        seed: 随机种子
        workers: 并行线程数
        factorization: Π̂ 的分解方式，"eigh" 或 "cholesky"（p 值只差 Monte-Carlo 误差）

    Returns:
        PortmanteauResult

    Example:
        >>> result = portmanteau(qacf(series, fit), B=10000, seed=1)
        >>> result.p_comb
    """
    if B < 1000:
        raise ValueError(f"B must be >= 1000, got {B}")
    n = report.n if n is None else n
    K = report.K
    q1 = float(n * np.sum(report.rho**2))
    q2 = float(n * np.sum(report.r**2))
    q = q1 + q2

    factor = psd_factor(report.pi_hat, factorization)
    sizes = [min(NULL_BLOCK, B - start) for start in range(0, B, NULL_BLOCK)]

    def run_block(i: int) -> np.ndarray:
        z = make_rng(seed, i).standard_normal((sizes[i], 2 * K)) @ factor.T
        s1 = np.sum(z[:, :K] ** 2, axis=1)
        s2 = np.sum(z[:, K:] ** 2, axis=1)
        return np.array([np.sum(s1 >= q1), np.sum(s2 >= q2), np.sum(s1 + s2 >= q)])

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        counts = np.sum(list(executor.map(run_block, range(len(sizes)))), axis=0)

    p1, p2, p_comb = (counts / B).tolist()
    return PortmanteauResult(K, q1, q2, q, p1, p2, p_comb, B, seed)


def qacf_confidence_bands(report: QacfReport, n: int | None = None, level: float = 0.95) -> pd.DataFrame:
    """
    逐滞后置信带 half-width_k = z_{(1+level)/2}·√Π̂_kk / √n

    Returns:
        2K 行的 DataFrame，列 k, statistic ("rho" / "r"), value, band, inside
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in range (0, 1), got {level}")
    n = report.n if n is None else n
    z = stats.norm.ppf(0.5 + level / 2)
    half = z * np.sqrt(np.diag(report.pi_hat)) / np.sqrt(n)
    K = report.K
    values = np.concatenate([report.rho, report.r])
    return pd.DataFrame(
        {
            "k": np.tile(np.arange(1, K + 1), 2),
            "statistic": ["rho"] * K + ["r"] * K,
            "value": values,
            "band": half,
            "inside": np.abs(values) <= half,
        }
    )
