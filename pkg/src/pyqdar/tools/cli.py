#!/usr/bin/env python3
"""
pyqdar 命令行

子命令：simulate, fit, select, diagnose, forecast, backtest, replicate, region

退出码：0 成功；1 有统计退化警告（例如协方差加了岭、CC 命中全相同、BIC 样本过小）；
2 出错（参数、数据解析、数值失败）。

每个产物都嵌入完整配置和种子，用 --config 指向产物即可原样重跑：
    pyqdar fit --input sp500.csv --tau 0.05 --order 1 --seed 7
    pyqdar fit --config out/fit.json
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np
import pandas as pd
from rich.console import Console

from pyqdar.backtest import WindowPolicy, backtest_suite, suite_frame
from pyqdar.config import (
    BACKTEST_LEVELS,
    BANDWIDTH_RULE,
    BIC_LEVELS,
    BURN_IN,
    DEFAULT_SEED,
    DEFAULT_TAU,
    MC_DRAWS,
    NULL_DRAWS,
    P_MAX_CLI,
    QACF_LAGS,
    REGION_GRID,
    RunConfig,
)
from pyqdar.core import WeightScheme
from pyqdar.diagnose import portmanteau, qacf, qacf_confidence_bands
from pyqdar.errors import QdarError
from pyqdar.estimate import FitOptions, fit, fit_levels, forecast_levels
from pyqdar.selection import select_order
from pyqdar.simulate import (
    Innovation,
    build_design,
    canonical_design,
    from_table,
    simulate_qdar,
    stationarity_region,
)
from pyqdar.tasks import STUDIES, create_frame_table
from pyqdar.utils import (
    load_series,
    print_json_message,
    read_artifact_config,
    write_csv_artifact,
    write_json_artifact,
)

console = Console()

EXIT_OK = 0
EXIT_DEGENERATE = 1
EXIT_ERROR = 2


# ========== 参数解析 ==========


def _shared_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", help="输入 CSV（单个数值列，必须有表头）")
    shared.add_argument("--column", help="指定数值列名")
    shared.add_argument("--output-dir", default=None, help="产物目录（默认 out）")
    shared.add_argument("--tau", type=float, help="分位水平")
    shared.add_argument("--tau-grid", type=float, nargs="+", help="分位水平网格")
    shared.add_argument("--order", type=int, help="阶数 p")
    shared.add_argument("--p-max", type=int, default=P_MAX_CLI)
    shared.add_argument("--weights", choices=["cubic", "unit"], default="cubic")
    shared.add_argument("--bandwidth", choices=["bofinger", "hall-sheather"], default=BANDWIDTH_RULE)
    shared.add_argument("--seed", type=int, default=DEFAULT_SEED)
    shared.add_argument("--reps", type=int, default=1)
    shared.add_argument("--workers", type=int, default=1)
    shared.add_argument("--design", help="内置设计名")
    shared.add_argument("--config", help="从产物中读取配置并重跑")
    return shared


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    shared = _shared_parser()
    parser = argparse.ArgumentParser(prog="pyqdar", description="Quantile double autoregression toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[shared], help="模拟序列")
    p.add_argument("--innovation", default="normal", help="normal 或 t<df>")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=BURN_IN)
    p.add_argument("--table", help="系数表 CSV（tau, b, phi1.., beta1..），代替 --design")
    p.add_argument("--c1", type=float, default=0.0)
    p.add_argument("--c2", type=float, default=0.0)

    p = sub.add_parser("fit", parents=[shared], help="单水平自加权估计")
    p.add_argument("--qar", action="store_true", help="约束 β ≡ 0")

    p = sub.add_parser("select", parents=[shared], help="组合 BIC 选阶")
    p.add_argument("--K", type=int, default=BIC_LEVELS, help="水平个数")

    p = sub.add_parser("diagnose", parents=[shared], help="残差 QACF 与混成检验")
    p.add_argument("--K", type=int, default=QACF_LAGS, help="滞后数")
    p.add_argument("--B", type=int, default=NULL_DRAWS, help="零分布抽样次数")

    p = sub.add_parser("forecast", parents=[shared], help="多水平一步预测")
    p.add_argument("--qar", action="store_true", help="约束 β ≡ 0")

    p = sub.add_parser("backtest", parents=[shared], help="滚动 VaR 预测与回测")
    p.add_argument("--origin", type=int, help="首个估计窗口长度（默认 n // 2）")
    p.add_argument("--window", type=int, help="固定窗口宽度（默认扩张窗口）")
    p.add_argument("--qar", action="store_true", help="约束 β ≡ 0")

    p = sub.add_parser("replicate", parents=[shared], help="Monte-Carlo 重复研究")
    p.add_argument("--study", choices=sorted(STUDIES), default="estimation")
    p.add_argument("--innovation", default="normal")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--K", type=int, help="BIC 水平个数或 QACF 滞后数")
    p.add_argument("--B", type=int, default=NULL_DRAWS)
    p.add_argument("--c1", type=float, default=0.0)
    p.add_argument("--c2", type=float, default=0.0)
    p.add_argument("--lags", type=int, nargs="+", default=[2, 4, 6])

    p = sub.add_parser("region", parents=[shared], help="(φ₁, β₁) 平稳区域")
    p.add_argument("--innovation", default="normal")
    p.add_argument("--kappa", type=float, default=0.0, help="矩指数，0 表示对数矩条件")
    p.add_argument("--grid", type=int, default=REGION_GRID, help="每个方向的格点数")
    p.add_argument("--phi-range", type=float, nargs=2, default=[-2.0, 2.0])
    p.add_argument("--beta-max", type=float, default=4.0)
    p.add_argument("--draws", type=int, default=MC_DRAWS)

    return parser.parse_args(argv)


_SHARED = {
    "input", "tau", "tau_grid", "order", "p_max", "weights", "bandwidth",
    "seed", "reps", "workers", "design",
}
_IGNORED = {"command", "config", "output_dir"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    把命令行参数整理为 RunConfig；给出 --config 时改用产物内嵌的配置

    只有显式给出的 --output-dir 会覆盖内嵌配置。
    """
    if args.config:
        config = RunConfig.from_dict(read_artifact_config(args.config))
        if config.command != args.command:
            raise ValueError(
                f"config from {args.config} is for command {config.command!r}, not {args.command!r}"
            )
        if args.output_dir:
            config.output_dir = args.output_dir
        console.print(f"[cyan]▶ 使用 {args.config} 中的配置重跑 {config.command}[/cyan]")
        return config

    values = vars(args)
    extra = {k: v for k, v in values.items() if k not in _SHARED | _IGNORED}
    return RunConfig(
        command=args.command,
        output_dir=args.output_dir or "out",
        extra=extra,
        **{k: values[k] for k in _SHARED},
    )


# ========== 公共工具 ==========


def _out(config: RunConfig, name: str) -> Path:
    return Path(config.output_dir) / name


def _write(config: RunConfig, stem: str, payload: Dict, frame: pd.DataFrame | None = None) -> None:
    meta = {"command": config.command, "config": config.to_dict(), "seed": config.seed}
    json_path = write_json_artifact(_out(config, f"{stem}.json"), payload, **meta)
    console.print(f"[green]✓ 已写出 {json_path}[/green]")
    if frame is not None:
        csv_path = write_csv_artifact(_out(config, f"{stem}.csv"), frame, **meta)
        console.print(f"[green]✓ 已写出 {csv_path}[/green]")


def _series(config: RunConfig):
    if not config.input:
        raise ValueError(f"{config.command} requires --input")
    series = load_series(config.input, config.extra.get("column"))
    console.print(f"[cyan]▶ 读取 {series.n} 个观测: {config.input}[/cyan]")
    return series


def _options(config: RunConfig, **changes) -> FitOptions:
    return FitOptions(
        bandwidth=config.bandwidth,
        seed=config.seed,
        fix_beta_zero=bool(config.extra.get("qar", False)),
        **changes,
    )


def _scheme(config: RunConfig) -> WeightScheme:
    return WeightScheme.parse(config.weights)


def _tau(config: RunConfig) -> float:
    return DEFAULT_TAU if config.tau is None else config.tau


def _order(config: RunConfig) -> int:
    return 1 if config.order is None else config.order


# ========== 子命令 ==========


def cmd_simulate(config: RunConfig) -> int:
    """模拟内置设计或系数表，写出单列 CSV（表头 y）"""
    extra = config.extra
    if extra.get("table"):
        table = pd.read_csv(extra["table"], comment="#")
        coefs = from_table(table, description=f"table:{extra['table']}")
    elif config.design:
        params = {}
        if canonical_design(config.design) == "misspec":
            params = {"c1": extra.get("c1", 0.0), "c2": extra.get("c2", 0.0)}
        coefs = build_design(config.design, extra.get("innovation", "normal"), **params)
    else:
        raise ValueError("simulate requires --design or --table")

    series = simulate_qdar(coefs, int(extra.get("n", 1000)), int(extra.get("burn_in", BURN_IN)), seed=config.seed)
    frame = pd.DataFrame({"y": series.values})
    meta = {"command": config.command, "config": config.to_dict(), "seed": config.seed}
    path = write_csv_artifact(_out(config, "simulate.csv"), frame, **meta)
    console.print(f"[green]✓ 模拟 {coefs.description}: {series.n} 个观测 → {path}[/green]")
    return EXIT_OK


def cmd_fit(config: RunConfig) -> int:
    series = _series(config)
    result = fit(series, _tau(config), _order(config), _scheme(config), _options(config))
    frame = pd.DataFrame(
        {
            "parameter": [f"phi{i}" for i in range(1, result.p + 1)]
            + ["b"]
            + [f"beta{i}" for i in range(1, result.p + 1)],
            "estimate": result.theta.as_vector(),
            "asd": result.asd if result.asd is not None else np.nan,
        }
    )
    _write(config, "fit", result.to_dict(), frame)
    print_json_message(f"拟合 τ={result.tau:g}, p={result.p}", result.theta.to_dict(), "green")

    degenerate = result.ridge > 0 or not result.converged
    if degenerate:
        console.print("[yellow]⚠ 拟合未收敛或信息矩阵加了岭[/yellow]")
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_select(config: RunConfig) -> int:
    series = _series(config)
    table = select_order(
        series,
        int(config.extra.get("K") or BIC_LEVELS),
        config.p_max,
        _scheme(config),
        _options(config, covariance=False, warn_near_median=False),
        workers=config.workers,
    )
    _write(config, "select", table.to_dict(), table.to_frame())
    console.print(create_frame_table(table.to_frame(), f"组合 BIC（p̂ = {table.chosen}）"))
    return EXIT_DEGENERATE if table.degenerate else EXIT_OK


def cmd_diagnose(config: RunConfig) -> int:
    series = _series(config)
    K = int(config.extra.get("K") or QACF_LAGS)
    result = fit(series, _tau(config), _order(config), _scheme(config), _options(config))
    report = qacf(series, result, K)
    test = portmanteau(report, B=int(config.extra.get("B", NULL_DRAWS)), seed=config.seed, workers=config.workers)
    bands = qacf_confidence_bands(report)
    _write(config, "diagnose", {"fit": result.to_dict(), "qacf": report.to_dict(), "portmanteau": test.to_dict()}, bands)
    console.print(create_frame_table(bands, f"残差 QACF (τ={result.tau:g}, K={K})"))
    print_json_message("混成检验", test.to_dict(), "cyan")

    degenerate = result.ridge > 0 or report.psd_deviation > 0
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_forecast(config: RunConfig) -> int:
    series = _series(config)
    p = _order(config)
    levels = config.tau_grid or list(BACKTEST_LEVELS)
    multifit = fit_levels(
        series, levels, p, _scheme(config), _options(config, covariance=False), workers=config.workers
    )
    values = forecast_levels(multifit, series.last_values(p))
    frame = pd.DataFrame({"tau": multifit.ok_levels, "forecast": values})
    payload = {
        "levels": multifit.levels.tolist(),
        "statuses": multifit.statuses,
        "forecasts": dict(zip(map(str, multifit.ok_levels.tolist()), values.tolist())),
        "rearranged": multifit.rearranged,
    }
    _write(config, "forecast", payload, frame)
    console.print(create_frame_table(frame, "一步分位预测"))
    return EXIT_OK if multifit.ok.all() else EXIT_DEGENERATE


def cmd_backtest(config: RunConfig) -> int:
    series = _series(config)
    window = config.extra.get("window")
    policy = WindowPolicy.fixed(int(window)) if window else WindowPolicy.expanding()
    reports = backtest_suite(
        series,
        config.tau_grid or list(BACKTEST_LEVELS),
        _order(config),
        policy,
        _scheme(config),
        _options(config, covariance=False, warn_near_median=False),
        origin=config.extra.get("origin"),
        workers=config.workers,
    )
    frame = suite_frame(reports)
    _write(config, "backtest", {"reports": [r.to_dict() for r in reports]}, frame)
    console.print(create_frame_table(frame, "VaR 回测（CC、DQ 为 p 值）"))

    if any(not r.ok for r in reports):
        raise QdarError("backtest failed at " + ", ".join(f"τ={r.tau:g}" for r in reports if not r.ok))
    degenerate = any(r.cc_degenerate or r.carried for r in reports)
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_replicate(config: RunConfig) -> int:
    """运行一个 Monte-Carlo 研究并写出汇总表"""
    extra = config.extra
    name = extra.get("study", "estimation")
    common = {"reps": config.reps, "seed": config.seed, "workers": config.workers}
    innovation = extra.get("innovation", "normal")
    n = int(extra.get("n", 1000))
    K = extra.get("K")

    if name == "estimation":
        study = STUDIES[name](config.design or "dar-const", innovation, n, _tau(config), **common)
    elif name == "selection":
        study = STUDIES[name](
            config.design or "order2-const", innovation, n, config.p_max, int(K or BIC_LEVELS), **common
        )
    elif name == "qacf":
        study = STUDIES[name](
            config.design or "dar-const", innovation, n, _tau(config), int(K or QACF_LAGS),
            tuple(extra.get("lags", (2, 4, 6))), **common,
        )
    elif name == "portmanteau":
        study = STUDIES[name](
            float(extra.get("c1", 0.0)), float(extra.get("c2", 0.0)), innovation, n, _tau(config),
            int(K or QACF_LAGS), int(extra.get("B", NULL_DRAWS)), **common,
        )
    elif name == "weights":
        study = STUDIES[name](
            config.design or "weights-varying", innovation, n, _tau(config), int(K or QACF_LAGS),
            tuple(extra.get("lags", (2, 4, 6))), **common,
        )
    else:
        raise ValueError(f"study must be one of {sorted(STUDIES)}, got {name!r}")

    _write(config, f"replicate_{name}", study.to_dict(), study.table)
    console.print(create_frame_table(study.table, f"{name} ({config.reps} 次重复)"))
    return EXIT_DEGENERATE if study.failed else EXIT_OK


def cmd_region(config: RunConfig) -> int:
    """写出 (φ₁, β₁) 网格上的平稳区域（长格式 CSV，供外部绘图）"""
    extra = config.extra
    grid = int(extra.get("grid", REGION_GRID))
    lo, hi = extra.get("phi_range", [-2.0, 2.0])
    region = stationarity_region(
        Innovation.parse(extra.get("innovation", "normal")),
        float(extra.get("kappa", 0.0)),
        np.linspace(lo, hi, grid),
        np.linspace(0.0, float(extra.get("beta_max", 4.0)), grid),
        draws=int(extra.get("draws", MC_DRAWS)),
        seed=config.seed,
        workers=config.workers,
    )
    meta = {"command": config.command, "config": config.to_dict(), "seed": config.seed}
    path = write_csv_artifact(_out(config, "region.csv"), region.to_frame(), **meta)
    console.print(f"[green]✓ 已写出 {path}[/green]")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "select": cmd_select,
    "diagnose": cmd_diagnose,
    "forecast": cmd_forecast,
    "backtest": cmd_backtest,
    "replicate": cmd_replicate,
    "region": cmd_region,
}


def main(argv: List[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        config = resolve_config(args)
        return COMMANDS[config.command](config)
    except (QdarError, ValueError, FileNotFoundError) as exc:
        console.print(f"[red]✗ {exc}[/red]")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
