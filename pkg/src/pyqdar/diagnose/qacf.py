"""
自加权残差分位自相关（QACF）及其联合渐近协方差 Π(τ)

ρ̂_k = [τ(1−τ)σ̂₁²]^{-1/2} (n−p)⁻¹ Σ_{t=p+k+1}^{n} w_t ψ_τ(η̂_t)(η̂_{t−k} − μ̂₁)
r̂_k = [τ(1−τ)σ̂₂²]^{-1/2} (n−p)⁻¹ Σ_{t=p+k+1}^{n} w_t ψ_τ(η̂_t)(|η̂_{t−k}| − μ̂₂)
Π = Ψ + HΞH' − MΩ₁⁻¹H' − HΩ₁⁻¹M'，Ξ = Ω₁⁻¹Ω₀Ω₁⁻¹
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import stats

from ..core import SeriesSample, WeightScheme, cond_quantile_jacobian, psi, self_weights
from ..errors import DegenerateSeriesError, InsufficientDataError
from ..estimate import FitOptions, FitResult, asymptotic_covariance, attach_covariance, psd_project
from ..estimate.covariance import information_inverse


@dataclass
class QacfMoments:
    """样本 QACF 与残差矩"""

    rho: np.ndarray
    r: np.ndarray
    mu1: float
    mu2: float
    sigma1_sq: float
    sigma2_sq: float


def sample_qacf(residuals: np.ndarray, weights: np.ndarray, tau: float, K: int) -> QacfMoments:
    """
    由残差和权重直接计算 ρ̂_k、r̂_k（k = 1..K）

    归一化为 1/(n−p)（即残差个数），第 k 个滞后的求和从第 k+1 个残差开始。
    矩 μ̂、σ̂² 在全部残差上计算，与 k 无关。

    Args:
        residuals: η̂_t，t = p+1..n
        weights: 与残差对齐的 w_t
        tau: 分位水平
        K: 最大滞后

    Raises:
        InsufficientDataError: 残差个数不超过 K
        DegenerateSeriesError: 残差（或其绝对值）方差为 0
    """
    eta = np.asarray(residuals, dtype=float)
    w = np.asarray(weights, dtype=float)
    m = eta.size
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if w.shape != eta.shape:
        raise ValueError(f"weights shape {w.shape} does not match residuals {eta.shape}")
    if m <= K:
        raise InsufficientDataError(f"{m} residuals leave an empty window for K={K}")

    abs_eta = np.abs(eta)
    mu1, mu2 = float(eta.mean()), float(abs_eta.mean())
    s1, s2 = float(np.mean((eta - mu1) ** 2)), float(np.mean((abs_eta - mu2) ** 2))
    if s1 <= 0 or s2 <= 0:
        raise DegenerateSeriesError("residuals have zero variance")

    lead = w * psi(eta, tau)
    rho = np.empty(K)
    r = np.empty(K)
    for k in range(1, K + 1):
        rho[k - 1] = lead[k:] @ (eta[:-k] - mu1)
        r[k - 1] = lead[k:] @ (abs_eta[:-k] - mu2)
    rho /= m * np.sqrt(tau * (1 - tau) * s1)
    r /= m * np.sqrt(tau * (1 - tau) * s2)
    return QacfMoments(rho, r, mu1, mu2, s1, s2)


@dataclass
class QacfReport:
    """
    Args:
        K: 滞后数
        tau: 分位水平
        n: 序列长度
        rho, r: ρ̂_{1..K}、r̂_{1..K}
        pi_hat: 2K×2K 的 Π̂（已投影为半正定）
        ci_halfwidths: 2K 个 95% 半宽（前 K 个对应 ρ̂，后 K 个对应 r̂）
        psd_deviation: 投影前后的 Frobenius 距离
    """

    K: int
    tau: float
    n: int
    rho: np.ndarray
    r: np.ndarray
    pi_hat: np.ndarray
    ci_halfwidths: np.ndarray
    mu1: float
    mu2: float
    sigma1_sq: float
    sigma2_sq: float
    psd_deviation: float = 0.0

    @property
    def pi1(self) -> np.ndarray:
        return self.pi_hat[: self.K, : self.K]

    @property
    def pi2(self) -> np.ndarray:
        return self.pi_hat[self.K :, self.K :]

    def to_dict(self) -> dict[str, Any]:
        return {
            "K": self.K,
            "tau": self.tau,
            "n": self.n,
            "rho": self.rho.tolist(),
            "r": self.r.tolist(),
            "pi_hat": self.pi_hat.tolist(),
            "ci_halfwidths": self.ci_halfwidths.tolist(),
            "mu1": self.mu1,
            "mu2": self.mu2,
            "sigma1_sq": self.sigma1_sq,
            "sigma2_sq": self.sigma2_sq,
            "psd_deviation": self.psd_deviation,
        }


def _lagged(values: np.ndarray, K: int) -> np.ndarray:
    """第 j 行为 (v_{j−1}, ..., v_{j−K})，j = K..m−1"""
    m = values.size
    return np.column_stack([values[K - k : m - k] for k in range(1, K + 1)])


def qacf(
    series: SeriesSample,
    fit: FitResult,
    K: int = 6,
    fhat: np.ndarray | None = None,
    scheme: WeightScheme | None = None,
) -> QacfReport:
    """
    残差 QACF 与 Π̂

    H、M、Ψ 用中心化并标准化的滞后误差 ((η − μ̂₁)/σ̂₁, (|η| − μ̂₂)/σ̂₂)
    在共同窗口（第 K+1 个残差起）上求样本均值。

    Args:
        series: 观测序列
        fit: 拟合结果
        K: 滞后数
        fhat: 差商密度，默认取 fit.density，缺失时按 fit 的带宽规则重新估计
        scheme: QACF 使用的加权方案，默认与 fit 相同

    Returns:
        QacfReport

    Raises:
        InsufficientDataError: n − p ≤ K + 10
    """
    m = series.n - fit.start
    if m <= K + 10:
        raise InsufficientDataError(f"n - p = {m} must exceed K + 10 = {K + 10}")

    if fhat is None:
        if fit.density is None:
            attach_covariance(series, fit, FitOptions(seed=fit.seed, fix_beta_zero=fit.fix_beta_zero))
        fhat = fit.density
    fhat = np.asarray(fhat, dtype=float)

    y, X = fit.rows(series)
    eta = y - fit.fitted(series)
    w = np.asarray(self_weights(series, fit.p, scheme or fit.weights, start=fit.start))
    moments = sample_qacf(eta, w, fit.tau, K)

    sandwich = asymptotic_covariance(series, fit, fhat)
    cols = np.arange(fit.p + 1) if fit.fix_beta_zero else np.arange(2 * fit.p + 1)
    omega0 = sandwich.omega0[np.ix_(cols, cols)]
    omega1 = sandwich.omega1[np.ix_(cols, cols)]
    inv1, _ = information_inverse(omega1)
    xi = inv1 @ omega0 @ inv1

    Q = cond_quantile_jacobian(fit.theta, X)[:, cols][K:]
    eps = np.hstack(
        [
            _lagged(eta - moments.mu1, K) / np.sqrt(moments.sigma1_sq),
            _lagged(np.abs(eta) - moments.mu2, K) / np.sqrt(moments.sigma2_sq),
        ]
    )
    wk, fk = w[K:], fhat[K:]
    L = eps.shape[0]
    H = (eps * (wk * fk)[:, None]).T @ Q / L
    M = (eps * (wk**2)[:, None]).T @ Q / L
    Psi = (eps * (wk**2)[:, None]).T @ eps / L
    cross = M @ inv1 @ H.T
    pi_hat, deviation = psd_project(Psi + H @ xi @ H.T - cross - cross.T)

    n = series.n
    half = stats.norm.ppf(0.975) * np.sqrt(np.diag(pi_hat)) / np.sqrt(n)
    return QacfReport(
        K=K,
        tau=fit.tau,
        n=n,
        rho=moments.rho,
        r=moments.r,
        pi_hat=pi_hat,
        ci_halfwidths=half,
        mu1=moments.mu1,
        mu2=moments.mu2,
        sigma1_sq=moments.sigma1_sq,
        sigma2_sq=moments.sigma2_sq,
        psd_deviation=deviation,
    )
