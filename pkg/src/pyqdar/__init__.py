"""
pyqdar - 分位数双自回归（QDAR）工具包

模拟、平稳性检验、自加权条件分位估计、选阶、残差诊断与 VaR 回测
"""

from .errors import (
    QdarError,
    NonFiniteError,
    DegenerateSeriesError,
    InsufficientDataError,
    CsvParseError,
    DidNotConvergeError,
    SingularInformationError,
    RankDeficientError,
    UnknownDesignError,
)
from .config import RunConfig
from .core import (
    ThetaTau,
    SeriesSample,
    WeightKind,
    WeightScheme,
    s_q,
    s_q_inv,
    check_loss,
    psi,
    lag_matrix,
    cond_quantile,
    cond_quantile_path,
    cond_quantile_grad,
    cond_quantile_jacobian,
    residuals,
    self_weights,
)
from .simulate import (
    CoefficientFunctions,
    DoubleArSpec,
    Innovation,
    from_double_ar,
    from_table,
    simulate_qdar,
    simulate_double_ar,
    StationarityVerdict,
    RegionMap,
    stationarity_bound,
    stationarity_region,
    build_design,
)
from .estimate import (
    BandwidthRule,
    bandwidth,
    FitOptions,
    FitResult,
    fit,
    attach_covariance,
    forecast_one_step,
    MultiFit,
    fit_levels,
    forecast_levels,
)
from .selection import BicTable, bic_at_level, select_order
from .diagnose import QacfReport, PortmanteauResult, qacf, portmanteau, qacf_confidence_bands
from .backtest import (
    WindowPolicy,
    HitSequence,
    rolling_forecast,
    cc_test,
    dq_test,
    BacktestReport,
    backtest_suite,
)
from .tasks import (
    run_replications,
    StudyResult,
    estimation_study,
    selection_study,
    qacf_study,
    portmanteau_study,
    weights_study,
)
from .utils import print_json_message, load_series

__version__ = "0.1.0"

__all__ = [
    # Errors
    "QdarError",
    "NonFiniteError",
    "DegenerateSeriesError",
    "InsufficientDataError",
    "CsvParseError",
    "DidNotConvergeError",
    "SingularInformationError",
    "RankDeficientError",
    "UnknownDesignError",
    # Config
    "RunConfig",
    # Core
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
    "residuals",
    "self_weights",
    # Simulate
    "CoefficientFunctions",
    "DoubleArSpec",
    "Innovation",
    "from_double_ar",
    "from_table",
    "simulate_qdar",
    "simulate_double_ar",
    "StationarityVerdict",
    "RegionMap",
    "stationarity_bound",
    "stationarity_region",
    "build_design",
    # Estimate
    "BandwidthRule",
    "bandwidth",
    "FitOptions",
    "FitResult",
    "fit",
    "attach_covariance",
    "forecast_one_step",
    "MultiFit",
    "fit_levels",
    "forecast_levels",
    # Selection
    "BicTable",
    "bic_at_level",
    "select_order",
    # Diagnose
    "QacfReport",
    "PortmanteauResult",
    "qacf",
    "portmanteau",
    "qacf_confidence_bands",
    # Backtest
    "WindowPolicy",
    "HitSequence",
    "rolling_forecast",
    "cc_test",
    "dq_test",
    "BacktestReport",
    "backtest_suite",
    # Tasks
    "run_replications",
    "StudyResult",
    "estimation_study",
    "selection_study",
    "qacf_study",
    "portmanteau_study",
    "weights_study",
    # Utils
    "print_json_message",
    "load_series",
]
