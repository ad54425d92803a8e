"""
QDAR 过程模拟

y_t = Σφ_i(u_t)y_{t-i} + S_Q(b(u_t) + Σβ_j(u_t)y²_{t-j})，u_t ~ U(0,1) i.i.d.
"""

from __future__ import annotations

import math

import numpy as np

from ..config import BURN_IN
from ..core import SeriesSample
from ..errors import NonFiniteError
from .coefficients import CoefficientFunctions, DoubleArSpec

# smallest nonzero value of Generator.random()
_U_MIN = 2.0**-53


def draw_uniforms(total: int, seed: int | np.random.SeedSequence | None) -> np.ndarray:
    """
    i.i.d. 标准均匀数，精确的 0 被替换为最小正值

    simulate_qdar 与 simulate_double_ar 共用这一序列，两者逐路径可比。
    """
    u = np.random.default_rng(seed).random(total)
    return np.maximum(u, _U_MIN)


def _check_lengths(n: int, burn_in: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")


def _overflow(t: int, burn_in: int, description: str) -> NonFiniteError:
    return NonFiniteError(
        f"recursion overflowed at step {t - burn_in} (burn-in {burn_in}) for {description}; "
        "the parameterization looks explosive"
    )


def simulate_qdar(
    coefs: CoefficientFunctions,
    n: int,
    burn_in: int = BURN_IN,
    seed: int | np.random.SeedSequence | None = None,
) -> SeriesSample:
    """
    模拟 QDAR 序列

    过程从零初始化，先迭代 burn_in 步再保留 n 个值。同一种子逐位可复现。

    Args:
        coefs: 系数函数
        n: 输出长度
        burn_in: 预热步数
        seed: 随机种子

    Returns:
        SeriesSample（origin 记录设计与种子）

    Raises:
        NonFiniteError: 递推溢出

    Example:
        >>> from pyqdar.simulate import build_design
        >>> series = simulate_qdar(build_design("dar-const"), 1000, seed=7)
    """
    _check_lengths(n, burn_in)
    total = n + burn_in
    u = draw_uniforms(total, seed)
    b, phi, beta = coefs.evaluate(u)
    p = coefs.p

    b = b.tolist()
    phi = phi.T.tolist()
    beta = beta.T.tolist()
    y = [0.0] * (total + p)
    for t in range(total):
        loc = 0.0
        scale = b[t]
        phi_t, beta_t = phi[t], beta[t]
        for i in range(p):
            lag = y[t + p - 1 - i]
            loc += phi_t[i] * lag
            scale += beta_t[i] * lag * lag
        value = loc + math.copysign(math.sqrt(abs(scale)), scale)
        if not math.isfinite(value):
            raise _overflow(t, burn_in, coefs.description)
        y[t + p] = value

    return SeriesSample(np.array(y[p + burn_in :]), origin=f"{coefs.description} seed={seed}")


def simulate_double_ar(
    spec: DoubleArSpec,
    n: int,
    burn_in: int = BURN_IN,
    seed: int | np.random.SeedSequence | None = None,
) -> SeriesSample:
    """
    直接按 DAR 递推 y_t = Σφ_i y_{t-i} + ε_t√(ω + Σβ_j y²_{t-j}) 模拟，ε_t = F⁻¹(u_t)

    与 simulate_qdar(from_double_ar(spec)) 使用同样的均匀数，路径一致。
    """
    _check_lengths(n, burn_in)
    total = n + burn_in
    eps = np.asarray(spec.innovation.ppf(draw_uniforms(total, seed)), dtype=float).tolist()
    p = len(spec.phi)
    y = [0.0] * (total + p)
    for t in range(total):
        loc = 0.0
        var = spec.omega
        for i in range(p):
            lag = y[t + p - 1 - i]
            loc += spec.phi[i] * lag
            var += spec.beta[i] * lag * lag
        value = loc + eps[t] * math.sqrt(var)
        if not math.isfinite(value):
            raise _overflow(t, burn_in, "double ar")
        y[t + p] = value
    return SeriesSample(np.array(y[p + burn_in :]), origin=f"double-ar seed={seed}")
