"""
多水平回测套件（5%、10%、90%、95%）

上尾水平的命中仍定义为 y_t < Q̂_τ，ECR 即落在预测分位之下的比例。
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import pandas as pd
from rich.console import Console

from ..config import BACKTEST_LEVELS, DQ_LAGS
from ..core import SeriesSample, WeightScheme
from ..errors import QdarError
from ..estimate import FitOptions
from .coverage import cc_test, dq_test
from .rolling import HitSequence, WindowPolicy, rolling_forecast

console = Console()


@dataclass
class BacktestReport:
    """
    单一水平的回测结果

    Args:
        model: "QDAR" 或 "QAR"（β ≡ 0 约束）
        tau: 分位水平
        m: 样本外预测个数
        ecr: 经验覆盖率（百分比）
        cc_stat, cc_pvalue: 条件覆盖检验
        dq_stat, dq_pvalue: 动态分位检验
        status: "ok" 或错误信息
    """

    model: str
    tau: float
    m: int
    ecr: float
    cc_stat: float
    cc_pvalue: float
    dq_stat: float
    dq_pvalue: float
    hit_count: int = 0
    carried: int = 0
    cc_degenerate: bool = False
    status: str = "ok"
    hits: HitSequence | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "tau": self.tau,
            "m": self.m,
            "ecr": self.ecr,
            "hit_count": self.hit_count,
            "cc_stat": self.cc_stat,
            "cc_pvalue": self.cc_pvalue,
            "dq_stat": self.dq_stat,
            "dq_pvalue": self.dq_pvalue,
            "carried": self.carried,
            "cc_degenerate": self.cc_degenerate,
            "status": self.status,
        }


def evaluate_hits(hits: HitSequence, model: str = "QDAR", n_lags: int = DQ_LAGS) -> BacktestReport:
    """对一条命中序列计算 ECR、CC、DQ"""
    cc = cc_test(hits)
    dq = dq_test(hits, n_lags)
    return BacktestReport(
        model=model,
        tau=hits.tau,
        m=hits.count,
        ecr=100.0 * hits.ecr,
        cc_stat=cc.stat,
        cc_pvalue=cc.pvalue,
        dq_stat=dq.stat,
        dq_pvalue=dq.pvalue,
        hit_count=hits.hit_count,
        carried=int(hits.carried.sum()),
        cc_degenerate=cc.degenerate,
        hits=hits,
    )


def backtest_suite(
    series: SeriesSample,
    levels: Sequence[float] = BACKTEST_LEVELS,
    p: int = 1,
    policy: WindowPolicy | None = None,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
    origin: int | None = None,
    workers: int = 1,
    n_lags: int = DQ_LAGS,
) -> list[BacktestReport]:
    """
    逐水平滚动预测并回测

    某一水平失败时返回 status 为错误信息、统计量为 NaN 的报告，其他水平照常进行。

    Args:
        series: 观测序列
        levels: 分位水平
        p: 阶数
        policy: 窗口策略
        scheme: 加权方案
        opts: 拟合选项，fix_beta_zero=True 时模型标记为 QAR
        origin: 首个估计窗口长度
        workers: 每个水平内滚动拟合的进程数
        n_lags: DQ 检验的滞后命中数

    Returns:
        每个水平一个 BacktestReport
    """
    opts = opts or FitOptions()
    model = "QAR" if opts.fix_beta_zero else "QDAR"
    reports: list[BacktestReport] = []
    for tau in levels:
        console.print(f"[cyan]▶ 回测 {model} τ={tau:g}[/cyan]")
        try:
            hits = rolling_forecast(series, tau, p, policy, scheme, opts, origin, workers)
            report = evaluate_hits(hits, model, n_lags)
        except (QdarError, ValueError) as exc:
            console.print(f"[red]✗ τ={tau:g} 回测失败: {exc}[/red]")
            nan = math.nan
            report = BacktestReport(model, tau, 0, nan, nan, nan, nan, nan, status=f"error: {exc}")
        else:
            console.print(
                f"[green]✓ τ={tau:g}: ECR={report.ecr:.2f}% CC p={report.cc_pvalue:.3f} "
                f"DQ p={report.dq_pvalue:.3f}[/green]"
            )
        reports.append(report)
    return reports


def suite_frame(reports: Sequence[BacktestReport]) -> pd.DataFrame:
    """回测汇总表（model, tau, ECR, CC, DQ 为 p 值）"""
    return pd.DataFrame(
        {
            "model": [r.model for r in reports],
            "tau": [r.tau for r in reports],
            "ECR": [round(r.ecr, 2) for r in reports],
            "CC": [r.cc_pvalue for r in reports],
            "DQ": [r.dq_pvalue for r in reports],
        }
    )
