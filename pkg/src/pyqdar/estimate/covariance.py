"""
渐近协方差 Σ(τ) = τ(1−τ) Ω₁⁻¹ Ω₀ Ω₁⁻¹ 的估计

Ω̂₀ = m⁻¹ Σ w_t² q̇_t q̇_t'，Ω̂₁ = m⁻¹ Σ f̂_{t-1} w_t q̇_t q̇_t'，
f̂ 由 τ ± h 两侧拟合的差商 2h / (q_t(θ̂_{τ+h}) − q_t(θ̂_{τ−h})) 给出。
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from rich.console import Console

from ..config import FMAX_IQR_FACTOR, GRAD_FLOOR, RIDGE_SCALE
from ..core import SeriesSample, cond_quantile_jacobian, self_weights
from ..errors import SingularInformationError
from .result import FitResult

console = Console()


@dataclass
class SandwichCovariance:
    """
    Args:
        matrix: Σ̂(τ)/n，对称半正定
        omega0: Ω̂₀
        omega1: Ω̂₁（加岭前）
        ridge: 实际加到 Ω̂₁ 对角线上的岭值（0 表示未加）
    """

    matrix: np.ndarray
    omega0: np.ndarray
    omega1: np.ndarray
    ridge: float

    @property
    def asd(self) -> np.ndarray:
        return np.sqrt(np.diag(self.matrix))


def density_cap(series: SeriesSample) -> float:
    """f̂ 的上限 f_max = 10 / IQR"""
    q75, q25 = np.percentile(series.values, [75, 25])
    iqr = q75 - q25
    if iqr <= 0:
        iqr = float(np.std(series.values)) or 1.0
    return FMAX_IQR_FACTOR / iqr


def density_quotient(
    series: SeriesSample,
    fit_lo: FitResult,
    fit_hi: FitResult,
    f_max: float | None = None,
) -> np.ndarray:
    """
    差商密度 f̂_t = 2h / (q_t(θ̂_{τ+h}) − q_t(θ̂_{τ−h}))

    分母为 0 时取 f_max，分母为负（两侧分位交叉）时取 0，最后截断到 [0, f_max]。

    Args:
        series: 观测序列
        fit_lo: τ − h 处的拟合
        fit_hi: τ + h 处的拟合
        f_max: 上限，默认 10 / IQR(series)

    Returns:
        t = start+1..n 上的 f̂
    """
    if fit_lo.p != fit_hi.p or fit_lo.start != fit_hi.start:
        raise ValueError("flanking fits must share order and sample window")
    if fit_hi.tau <= fit_lo.tau:
        raise ValueError(f"upper level {fit_hi.tau} must exceed lower level {fit_lo.tau}")
    f_max = density_cap(series) if f_max is None else f_max
    two_h = fit_hi.tau - fit_lo.tau
    den = fit_hi.fitted(series) - fit_lo.fitted(series)
    with np.errstate(divide="ignore"):
        f = np.where(den > 0, two_h / np.where(den > 0, den, 1.0), np.where(den == 0, f_max, 0.0))
    return np.clip(f, 0.0, f_max)


def psd_project(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """
    对称化后把负特征值截为 0

    Returns:
        (投影后的矩阵, 与对称化矩阵的 Frobenius 距离)
    """
    sym = 0.5 * (matrix + matrix.T)
    vals, vecs = np.linalg.eigh(sym)
    if np.all(vals >= 0):
        return sym, 0.0
    projected = (vecs * np.clip(vals, 0.0, None)) @ vecs.T
    projected = 0.5 * (projected + projected.T)
    return projected, float(np.linalg.norm(projected - sym))


def _free_columns(fit: FitResult) -> np.ndarray:
    dim = 2 * fit.p + 1
    return np.arange(fit.p + 1) if fit.fix_beta_zero else np.arange(dim)


def information_inverse(omega1: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Ω̂₁⁻¹，奇异时加 ε·I（ε = 1e-8·trace/dim）

    Raises:
        SingularInformationError: 加岭后仍不可逆
    """
    dim = omega1.shape[0]
    ridge = 0.0
    if np.linalg.cond(omega1) < 1.0 / np.finfo(float).eps:
        try:
            return np.linalg.inv(omega1), ridge
        except np.linalg.LinAlgError:
            pass
    ridge = RIDGE_SCALE * float(np.trace(omega1)) / dim
    console.print(f"[yellow]⚠ Ω̂₁ 奇异，加岭 {ridge:.3e}[/yellow]")
    regularized = omega1 + ridge * np.eye(dim)
    try:
        if ridge <= 0 or not np.isfinite(ridge):
            raise np.linalg.LinAlgError("zero trace")
        inverse = np.linalg.inv(regularized)
    except np.linalg.LinAlgError as exc:
        raise SingularInformationError(f"information matrix is singular after ridge {ridge:.3e}: {exc}") from None
    if not np.all(np.isfinite(inverse)):
        raise SingularInformationError(f"information matrix is singular after ridge {ridge:.3e}")
    return inverse, ridge


def asymptotic_covariance(
    series: SeriesSample,
    fit: FitResult,
    fhat: np.ndarray,
    floor: float = GRAD_FLOOR,
) -> SandwichCovariance:
    """
    夹心协方差 Σ̂(τ)/n

    矩阵由未归一化的和 S₀ = Σw²q̇q̇'、S₁ = Σf̂wq̇q̇' 直接给出 τ(1−τ)S₁⁻¹S₀S₁⁻¹，
    与 Ω 的归一化选择无关。约束 β ≡ 0 的拟合只在 (φ, b) 上计算，β 行列为 0。

    Args:
        series: 观测序列
        fit: τ 处的拟合
        fhat: 与 fit 同窗口的密度估计
        floor: 梯度 |h_t| 下限

    Returns:
        SandwichCovariance

    Raises:
        SingularInformationError: Ω̂₁ 加岭后仍奇异
    """
    _, X = fit.rows(series)
    fhat = np.asarray(fhat, dtype=float)
    if fhat.shape != (X.shape[0],):
        raise ValueError(f"fhat must have length {X.shape[0]}, got {fhat.shape}")
    w = self_weights(series, fit.p, fit.weights, start=fit.start)
    cols = _free_columns(fit)
    Q = cond_quantile_jacobian(fit.theta, X, floor)[:, cols]
    m = X.shape[0]

    omega0 = (Q * (w**2)[:, None]).T @ Q / m
    omega1 = (Q * (fhat * w)[:, None]).T @ Q / m
    inv1, ridge = information_inverse(omega1)
    tau = fit.tau
    free = tau * (1 - tau) * inv1 @ omega0 @ inv1 / m
    free, _ = psd_project(free)

    dim = 2 * fit.p + 1
    matrix = np.zeros((dim, dim))
    matrix[np.ix_(cols, cols)] = free
    full0 = np.zeros((dim, dim))
    full0[np.ix_(cols, cols)] = omega0
    full1 = np.zeros((dim, dim))
    full1[np.ix_(cols, cols)] = omega1
    return SandwichCovariance(matrix, full0, full1, ridge)
