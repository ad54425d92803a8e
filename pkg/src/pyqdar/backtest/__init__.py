"""
回测模块 - 滚动 VaR 预测、CC 与 DQ 检验
"""

from .rolling import HitSequence, WindowPolicy, rolling_forecast
from .coverage import (
    CcResult,
    DqResult,
    cc_test,
    christoffersen_ind,
    dq_design,
    dq_regression,
    dq_test,
    kupiec_uc,
)
from .suite import BacktestReport, backtest_suite, evaluate_hits, suite_frame

__all__ = [
    "HitSequence",
    "WindowPolicy",
    "rolling_forecast",
    "CcResult",
    "DqResult",
    "cc_test",
    "christoffersen_ind",
    "dq_design",
    "dq_regression",
    "dq_test",
    "kupiec_uc",
    "BacktestReport",
    "backtest_suite",
    "evaluate_hits",
    "suite_frame",
]
