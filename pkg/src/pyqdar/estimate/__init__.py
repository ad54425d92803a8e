"""
估计模块 - 自加权条件分位估计、带宽、协方差与多水平拟合
"""

from .bandwidth import BandwidthRule, bandwidth
from .result import BandwidthInfo, FitOptions, FitResult
from .covariance import (
    SandwichCovariance,
    asymptotic_covariance,
    density_cap,
    density_quotient,
    information_inverse,
    psd_project,
)
from .fitting import attach_covariance, fit, forecast_one_step, linear_start, start_points
from .levels import MultiFit, fit_levels, forecast_levels

__all__ = [
    "BandwidthRule",
    "bandwidth",
    "BandwidthInfo",
    "FitOptions",
    "FitResult",
    "SandwichCovariance",
    "asymptotic_covariance",
    "density_cap",
    "density_quotient",
    "information_inverse",
    "psd_project",
    "attach_covariance",
    "fit",
    "forecast_one_step",
    "linear_start",
    "start_points",
    "MultiFit",
    "fit_levels",
    "forecast_levels",
]
