"""
核心模块 - 变换、参数类型、条件分位与自加权
"""

from .types import ThetaTau, SeriesSample, WeightKind, WeightScheme
from .transforms import s_q, s_q_inv, check_loss, psi
from .quantile import (
    lag_matrix,
    cond_quantile,
    cond_quantile_path,
    cond_quantile_grad,
    cond_quantile_jacobian,
    scale_argument,
    residuals,
)
from .weights import self_weights

__all__ = [
    "ThetaTau",
    "SeriesSample",
    "WeightKind",
    "WeightScheme",
    "s_q",
    "s_q_inv",
    "check_loss",
    "psi",
    "lag_matrix",
    "cond_quantile",
    "cond_quantile_path",
    "cond_quantile_grad",
    "cond_quantile_jacobian",
    "scale_argument",
    "residuals",
    "self_weights",
]
