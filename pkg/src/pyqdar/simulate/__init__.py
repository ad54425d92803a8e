"""
模拟模块 - 系数函数、QDAR/DAR 模拟、平稳性检验与内置设计
"""

from .coefficients import (
    CoefficientFunctions,
    DoubleArSpec,
    Innovation,
    constant,
    from_double_ar,
    from_table,
)
from .process import draw_uniforms, simulate_qdar, simulate_double_ar
from .stationarity import StationarityVerdict, RegionMap, stationarity_bound, stationarity_region
from .designs import DESIGN_ALIASES, DESIGNS, DESIGN_ORDERS, build_design, canonical_design, misspec

__all__ = [
    "CoefficientFunctions",
    "DoubleArSpec",
    "Innovation",
    "constant",
    "from_double_ar",
    "from_table",
    "draw_uniforms",
    "simulate_qdar",
    "simulate_double_ar",
    "StationarityVerdict",
    "RegionMap",
    "stationarity_bound",
    "stationarity_region",
    "DESIGN_ALIASES",
    "DESIGNS",
    "DESIGN_ORDERS",
    "build_design",
    "canonical_design",
    "misspec",
]
