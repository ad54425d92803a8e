"""
Monte-Carlo 重复研究

每个研究由一个模块级任务函数（可 pickle，供进程池使用）和一个汇总函数组成：
任务函数对一次重复返回一组数值，汇总函数在按序号排序的记录上计算表格。
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from ..config import BURN_IN, NULL_DRAWS, P_MAX_STUDY, QACF_LAGS, STUDY_STARTS, BIC_LEVELS
from ..core import WeightScheme
from ..diagnose import portmanteau, qacf
from ..estimate import BandwidthRule, FitOptions, attach_covariance, fit
from ..selection import select_order
from ..simulate import DESIGN_ORDERS, build_design, simulate_qdar
from .runner import ReplicationRecord, run_replications


@dataclass
class StudyResult:
    """一次研究的汇总表与逐次记录"""

    name: str
    params: Dict[str, Any]
    table: pd.DataFrame
    records: List[ReplicationRecord] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return sum(not r.ok for r in self.records)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "study": self.name,
            "params": self.params,
            "reps": len(self.records),
            "failed": self.failed,
            "table": self.table.to_dict(orient="records"),
        }


def _seeds(seed: np.random.SeedSequence, count: int) -> List[int]:
    return [int(s) for s in seed.generate_state(count)]


def _options(seed: int, **changes: Any) -> FitOptions:
    return FitOptions(n_starts=STUDY_STARTS, seed=seed, warn_near_median=False, **changes)


def _simulate(design: str, innovation: str, n: int, seed: int, **params: float):
    return simulate_qdar(build_design(design, innovation, **params), n, BURN_IN, seed=seed)


def _labels(p: int) -> List[str]:
    return [f"phi{i}" for i in range(1, p + 1)] + ["b"] + [f"beta{i}" for i in range(1, p + 1)]


def _esd(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else math.nan


def _iqr(values: np.ndarray) -> float:
    q75, q25 = np.percentile(values, [75, 25])
    return float(q75 - q25)


def _stack(records: Sequence[ReplicationRecord], key: str) -> np.ndarray:
    return np.array([r.values[key] for r in records if r.ok], dtype=float)


# ========== 估计研究 ==========


def estimation_task(
    index: int,
    seed: np.random.SeedSequence,
    *,
    design: str,
    innovation: str,
    n: int,
    tau: float,
) -> Dict[str, Any]:
    sim_seed, fit_seed = _seeds(seed, 2)
    series = _simulate(design, innovation, n, sim_seed)
    opts = _options(fit_seed)
    result = fit(series, tau, DESIGN_ORDERS[design], opts=opts)
    asd_hs = result.asd.tolist()
    attach_covariance(series, result, opts, BandwidthRule.BOFINGER)
    return {
        "estimate": result.theta.as_vector().tolist(),
        "asd_hs": asd_hs,
        "asd_b": result.asd.tolist(),
    }


def estimation_study(
    design: str = "dar-const",
    innovation: str = "normal",
    n: int = 1000,
    tau: float = 0.25,
    reps: int = 200,
    seed: int | None = None,
    workers: int = 1,
    show_monitor: bool = True,
) -> StudyResult:
    """
    估计量偏差、经验标准差与两种带宽下的渐近标准差

    Returns:
        StudyResult，表格列：parameter, true, bias, esd, asd_b, asd_hs, coverage_hs
        （coverage_hs 为 ±1.96·ASD_HS 区间覆盖真值的比例）

    Example:
        >>> study = estimation_study("dar-const", n=1000, tau=0.25, reps=200, seed=7, workers=8)
        >>> study.table
    """
    task = functools.partial(estimation_task, design=design, innovation=innovation, n=n, tau=tau)
    records = run_replications(task, reps, seed, workers, name=f"estimation {design}", show_monitor=show_monitor)

    truth = build_design(design, innovation).theta_at(tau).as_vector()
    est = _stack(records, "estimate")
    asd_hs = _stack(records, "asd_hs")
    asd_b = _stack(records, "asd_b")
    rows = []
    for j, label in enumerate(_labels(DESIGN_ORDERS[design])):
        if est.size == 0:
            rows.append({"parameter": label, "true": truth[j], "bias": math.nan, "esd": math.nan,
                         "asd_b": math.nan, "asd_hs": math.nan, "coverage_hs": math.nan})
            continue
        covered = np.abs(est[:, j] - truth[j]) <= 1.96 * asd_hs[:, j]
        rows.append(
            {
                "parameter": label,
                "true": float(truth[j]),
                "bias": float(est[:, j].mean() - truth[j]),
                "esd": _esd(est[:, j]),
                "asd_b": float(asd_b[:, j].mean()),
                "asd_hs": float(asd_hs[:, j].mean()),
                "coverage_hs": float(covered.mean()),
            }
        )
    params = {"design": design, "innovation": innovation, "n": n, "tau": tau, "reps": reps, "seed": seed}
    return StudyResult("estimation", params, pd.DataFrame(rows), records)


# ========== 选阶研究 ==========


def selection_task(
    index: int,
    seed: np.random.SeedSequence,
    *,
    design: str,
    innovation: str,
    n: int,
    p_max: int,
    levels: int,
) -> Dict[str, Any]:
    sim_seed, fit_seed = _seeds(seed, 2)
    series = _simulate(design, innovation, n, sim_seed)
    table = select_order(series, levels, p_max, opts=_options(fit_seed, covariance=False))
    return {"chosen": table.chosen, "degenerate": table.degenerate}


def selection_study(
    design: str = "order2-const",
    innovation: str = "normal",
    n: int = 1000,
    p_max: int = P_MAX_STUDY,
    levels: int = BIC_LEVELS,
    reps: int = 200,
    seed: int | None = None,
    workers: int = 1,
    show_monitor: bool = True,
) -> StudyResult:
    """
    组合 BIC 的欠拟合 / 正确 / 过拟合比例（百分比）

    Example:
        >>> selection_study("order2-const", reps=200, seed=3).table
    """
    task = functools.partial(
        selection_task, design=design, innovation=innovation, n=n, p_max=p_max, levels=levels
    )
    records = run_replications(task, reps, seed, workers, name=f"selection {design}", show_monitor=show_monitor)

    true_p = DESIGN_ORDERS[design]
    chosen = _stack(records, "chosen")
    share = (lambda mask: float(100 * mask.mean())) if chosen.size else (lambda mask: math.nan)
    table = pd.DataFrame(
        [
            {
                "design": design,
                "n": n,
                "true_p": true_p,
                "under": share(chosen < true_p),
                "exact": share(chosen == true_p),
                "over": share(chosen > true_p),
            }
        ]
    )
    params = {"design": design, "innovation": innovation, "n": n, "p_max": p_max, "levels": levels,
              "reps": reps, "seed": seed}
    return StudyResult("selection", params, table, records)


# ========== QACF 研究 ==========


def qacf_task(
    index: int,
    seed: np.random.SeedSequence,
    *,
    design: str,
    innovation: str,
    n: int,
    tau: float,
    K: int,
) -> Dict[str, Any]:
    sim_seed, fit_seed = _seeds(seed, 2)
    series = _simulate(design, innovation, n, sim_seed)
    result = fit(series, tau, DESIGN_ORDERS[design], opts=_options(fit_seed))
    report = qacf(series, result, K)
    return {
        "rho": report.rho.tolist(),
        "r": report.r.tolist(),
        "asd": np.sqrt(np.diag(report.pi_hat) / report.n).tolist(),
    }


def qacf_study(
    design: str = "dar-const",
    innovation: str = "normal",
    n: int = 1000,
    tau: float = 0.25,
    K: int = QACF_LAGS,
    lags: Sequence[int] = (2, 4, 6),
    reps: int = 200,
    seed: int | None = None,
    workers: int = 1,
    show_monitor: bool = True,
) -> StudyResult:
    """
    残差 QACF 的偏差、ESD 与 ASD（ρ̂_k 和 r̂_k，k ∈ lags）

    真实模型下 ρ_k = r_k = 0，所以 bias 就是样本均值。
    """
    bad = [k for k in lags if not 1 <= k <= K]
    if bad:
        raise ValueError(f"lags must be in range [1, {K}], got {bad}")
    task = functools.partial(qacf_task, design=design, innovation=innovation, n=n, tau=tau, K=K)
    records = run_replications(task, reps, seed, workers, name=f"qacf {design}", show_monitor=show_monitor)

    rho, r, asd = _stack(records, "rho"), _stack(records, "r"), _stack(records, "asd")
    rows = []
    for name, values, offset in (("rho", rho, 0), ("r", r, K)):
        for k in lags:
            if values.size == 0:
                rows.append({"statistic": name, "k": k, "bias": math.nan, "esd": math.nan, "asd": math.nan})
                continue
            rows.append(
                {
                    "statistic": name,
                    "k": k,
                    "bias": float(values[:, k - 1].mean()),
                    "esd": _esd(values[:, k - 1]),
                    "asd": float(asd[:, offset + k - 1].mean()),
                }
            )
    params = {"design": design, "innovation": innovation, "n": n, "tau": tau, "K": K, "lags": list(lags),
              "reps": reps, "seed": seed}
    return StudyResult("qacf", params, pd.DataFrame(rows), records)


# ========== 检验水平与功效 ==========


def portmanteau_task(
    index: int,
    seed: np.random.SeedSequence,
    *,
    innovation: str,
    n: int,
    tau: float,
    K: int,
    B: int,
    c1: float,
    c2: float,
) -> Dict[str, Any]:
    sim_seed, fit_seed, null_seed = _seeds(seed, 3)
    series = _simulate("misspec", innovation, n, sim_seed, c1=c1, c2=c2)
    result = fit(series, tau, DESIGN_ORDERS["misspec"], opts=_options(fit_seed))
    test = portmanteau(qacf(series, result, K), B=B, seed=null_seed)
    return {"p1": test.p1, "p2": test.p2, "p_comb": test.p_comb}


def portmanteau_study(
    c1: float = 0.0,
    c2: float = 0.0,
    innovation: str = "normal",
    n: int = 1000,
    tau: float = 0.25,
    K: int = QACF_LAGS,
    B: int = NULL_DRAWS,
    level: float = 0.05,
    reps: int = 500,
    seed: int | None = None,
    workers: int = 1,
    show_monitor: bool = True,
) -> StudyResult:
    """
    Q₁、Q₂、Q 的拒绝率（百分比）

    数据来自 misspec 设计，拟合阶数固定为 1：c1 = c2 = 0 时给出检验水平，
    c1 > 0（位置误设）或 c2 > 0（尺度误设）时给出功效。
    """
    task = functools.partial(
        portmanteau_task, innovation=innovation, n=n, tau=tau, K=K, B=B, c1=c1, c2=c2
    )
    records = run_replications(task, reps, seed, workers, name=f"portmanteau c1={c1:g} c2={c2:g}",
                               show_monitor=show_monitor)

    def rate(key: str) -> float:
        values = _stack(records, key)
        return float(100 * np.mean(values < level)) if values.size else math.nan

    table = pd.DataFrame(
        [{"c1": c1, "c2": c2, "n": n, "tau": tau, "Q1": rate("p1"), "Q2": rate("p2"), "Q": rate("p_comb")}]
    )
    params = {"innovation": innovation, "n": n, "tau": tau, "K": K, "B": B, "level": level, "c1": c1,
              "c2": c2, "reps": reps, "seed": seed}
    return StudyResult("portmanteau", params, table, records)


# ========== 自加权效率 ==========


def weights_task(
    index: int,
    seed: np.random.SeedSequence,
    *,
    design: str,
    innovation: str,
    n: int,
    tau: float,
    K: int,
) -> Dict[str, Any]:
    sim_seed, fit_seed = _seeds(seed, 2)
    series = _simulate(design, innovation, n, sim_seed)
    p = DESIGN_ORDERS[design]
    out: Dict[str, Any] = {}
    for label, scheme in (("weighted", WeightScheme.cubic()), ("unweighted", WeightScheme.unit())):
        result = fit(series, tau, p, scheme, _options(fit_seed))
        report = qacf(series, result, K)
        out[label] = result.theta.as_vector().tolist() + report.rho.tolist() + report.r.tolist()
    return out


def weights_study(
    design: str = "weights-varying",
    innovation: str = "normal",
    n: int = 1000,
    tau: float = 0.25,
    K: int = QACF_LAGS,
    lags: Sequence[int] = (2, 4, 6),
    reps: int = 200,
    seed: int | None = None,
    workers: int = 1,
    show_monitor: bool = True,
) -> StudyResult:
    """
    自加权与不加权估计的离散程度对比（参数和 QACF 的 IQR、ESD）

    重尾新息下自加权估计的 IQR 应明显更小。
    """
    task = functools.partial(weights_task, design=design, innovation=innovation, n=n, tau=tau, K=K)
    records = run_replications(task, reps, seed, workers, name=f"weights {design}", show_monitor=show_monitor)

    p = DESIGN_ORDERS[design]
    names = _labels(p) + [f"rho{k}" for k in range(1, K + 1)] + [f"r{k}" for k in range(1, K + 1)]
    keep = list(range(2 * p + 1)) + [2 * p + k for k in lags] + [2 * p + K + k for k in lags]
    rows = []
    for label in ("weighted", "unweighted"):
        values = _stack(records, label)
        for j in keep:
            column = values[:, j] if values.size else np.array([])
            rows.append(
                {
                    "scheme": label,
                    "quantity": names[j],
                    "median": float(np.median(column)) if column.size else math.nan,
                    "iqr": _iqr(column) if column.size else math.nan,
                    "esd": _esd(column),
                }
            )
    params = {"design": design, "innovation": innovation, "n": n, "tau": tau, "K": K, "lags": list(lags),
              "reps": reps, "seed": seed}
    return StudyResult("weights", params, pd.DataFrame(rows), records)


STUDIES = {
    "estimation": estimation_study,
    "selection": selection_study,
    "qacf": qacf_study,
    "portmanteau": portmanteau_study,
    "weights": weights_study,
}
