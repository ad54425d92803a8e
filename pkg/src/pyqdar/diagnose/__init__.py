"""
诊断模块 - 自加权残差 QACF 与组合检验
"""

from .qacf import QacfMoments, QacfReport, qacf, sample_qacf
from .portmanteau import PortmanteauResult, portmanteau, psd_factor, qacf_confidence_bands

__all__ = [
    "QacfMoments",
    "QacfReport",
    "qacf",
    "sample_qacf",
    "PortmanteauResult",
    "portmanteau",
    "psd_factor",
    "qacf_confidence_bands",
]
