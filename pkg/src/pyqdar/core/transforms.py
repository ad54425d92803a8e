"""
标量变换：S_Q、check loss、ψ_τ

全部函数对标量和 numpy 数组都成立（逐元素）。
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike


def s_q(x: ArrayLike) -> np.ndarray | float:
    """S_Q(x) = √|x|·sgn(x)"""
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.abs(x)) * np.sign(x)
    return out if out.ndim else float(out)


def s_q_inv(x: ArrayLike) -> np.ndarray | float:
    """S_Q 的反函数 x²·sgn(x)"""
    x = np.asarray(x, dtype=float)
    out = x * np.abs(x)
    return out if out.ndim else float(out)


def check_loss(x: ArrayLike, tau: float) -> np.ndarray | float:
    """
    check 函数 ρ_τ(x) = x·(τ − I(x<0))

    Args:
        x: 残差
        tau: 分位水平

    Returns:
        非负损失
    """
    x = np.asarray(x, dtype=float)
    out = x * (tau - (x < 0))
    return out if out.ndim else float(out)


def psi(x: ArrayLike, tau: float) -> np.ndarray | float:
    """ψ_τ(x) = τ − I(x<0)，严格不等号，ψ_τ(0) = τ"""
    x = np.asarray(x, dtype=float)
    out = tau - (x < 0).astype(float)
    return out if out.ndim else float(out)
