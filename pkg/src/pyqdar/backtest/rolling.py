"""
滚动一步 VaR 预测

在每个预测原点用原点之前的数据重新拟合，预测下一期条件分位并记录命中
H_t = I(y_t < Q̂_τ(y_t | F_{t−1}))。
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
from rich.console import Console

from ..config import MIN_ROWS_PER_PARAM
from ..core import SeriesSample, ThetaTau, WeightScheme, cond_quantile
from ..errors import QdarError
from ..estimate import FitOptions, fit
from ..utils import derive_seed

console = Console()


@dataclass(frozen=True)
class WindowPolicy:
    """
    估计窗口策略

    Args:
        kind: "expanding"（从序列开头到原点）或 "fixed"（原点前 width 个观测）
        width: 固定窗口宽度
    """

    kind: str = "expanding"
    width: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("expanding", "fixed"):
            raise ValueError(f"window policy must be expanding or fixed, got {self.kind!r}")
        if self.kind == "fixed" and (self.width is None or self.width < 1):
            raise ValueError(f"fixed window needs width >= 1, got {self.width}")

    @classmethod
    def expanding(cls) -> WindowPolicy:
        return cls("expanding")

    @classmethod
    def fixed(cls, width: int) -> WindowPolicy:
        return cls("fixed", int(width))

    def window(self, target: int) -> slice:
        if self.kind == "expanding":
            return slice(0, target)
        return slice(max(0, target - self.width), target)


@dataclass
class HitSequence:
    """
    Args:
        hits: 命中序列
        tau: 分位水平
        forecasts: 对齐的 VaR 预测
        actuals: 实际观测
        targets: 被预测观测的 0 基索引
        carried: 该原点拟合失败、沿用上一次成功拟合的标记
    """

    hits: np.ndarray
    tau: float
    forecasts: np.ndarray
    actuals: np.ndarray
    targets: np.ndarray
    carried: np.ndarray

    def __post_init__(self) -> None:
        self.hits = np.asarray(self.hits, dtype=bool)
        self.forecasts = np.asarray(self.forecasts, dtype=float)
        if self.hits.shape != self.forecasts.shape:
            raise ValueError(
                f"hits {self.hits.shape} and forecasts {self.forecasts.shape} must align"
            )

    @classmethod
    def from_forecasts(cls, actuals: np.ndarray, forecasts: np.ndarray, tau: float) -> HitSequence:
        actuals = np.asarray(actuals, dtype=float)
        forecasts = np.asarray(forecasts, dtype=float)
        return cls(
            hits=actuals < forecasts,
            tau=tau,
            forecasts=forecasts,
            actuals=actuals,
            targets=np.arange(actuals.size),
            carried=np.zeros(actuals.size, dtype=bool),
        )

    @property
    def count(self) -> int:
        return int(self.hits.size)

    @property
    def hit_count(self) -> int:
        return int(self.hits.sum())

    @property
    def ecr(self) -> float:
        return self.hit_count / self.count if self.count else float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {
            "tau": self.tau,
            "m": self.count,
            "hits": self.hit_count,
            "ecr": self.ecr,
            "carried": int(self.carried.sum()),
        }


def _fit_origin(task: tuple) -> tuple[np.ndarray | None, str]:
    values, tau, p, scheme, opts = task
    try:
        result = fit(SeriesSample(values), tau, p, scheme, opts)
        return result.theta.as_vector(), "ok"
    except (QdarError, ValueError) as exc:
        return None, str(exc)


def rolling_forecast(
    series: SeriesSample,
    tau: float,
    p: int,
    policy: WindowPolicy | None = None,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
    origin: int | None = None,
    workers: int = 1,
) -> HitSequence:
    """
    滚动预测并记录命中

    第一个原点使用前 origin 个观测，之后每次前移一步，共 m = n − origin 次重拟合。
    各原点的种子由 (opts.seed, 目标索引) 派生；workers > 1 时原点分批在进程池中拟合，
    结果按原点顺序排列。

    Args:
        series: 观测序列
        tau: 分位水平
        p: 阶数
        policy: 窗口策略，默认扩张窗口
        scheme: 加权方案
        opts: 拟合选项（协方差自动关闭）
        origin: 首个估计窗口的长度，默认 n // 2
        workers: 进程数

    Returns:
        HitSequence

    Raises:
        InsufficientDataError: 首个窗口不足 10(2p+1) 行（由拟合抛出）
        QdarError: 首个原点拟合失败，无可沿用的拟合
    """
    policy = policy or WindowPolicy.expanding()
    scheme = scheme or WeightScheme()
    opts = opts or FitOptions()
    n = series.n
    origin = n // 2 if origin is None else origin
    if not 0 < origin < n:
        raise ValueError(f"origin must be in range (0, {n}), got {origin}")
    first = series.values[policy.window(origin)]
    need = MIN_ROWS_PER_PARAM * (2 * p + 1) + p
    if first.size < need:
        raise ValueError(f"first window has {first.size} observations, need at least {need}")

    targets = np.arange(origin, n)
    tasks = []
    for t in targets:
        seed = int(derive_seed(opts.seed, int(t)).generate_state(1)[0])
        side = opts.but(covariance=False, warn_near_median=False, seed=seed, workers=1)
        tasks.append((series.values[policy.window(int(t))].copy(), tau, p, scheme, side))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(_fit_origin, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = [_fit_origin(task) for task in tasks]

    forecasts = np.empty(targets.size)
    carried = np.zeros(targets.size, dtype=bool)
    last: ThetaTau | None = None
    for i, (t, (vector, message)) in enumerate(zip(targets, outcomes)):
        if vector is None:
            if last is None:
                raise QdarError(f"fit failed at the first origin {t}: {message}")
            console.print(f"[yellow]⚠ 原点 {t} 拟合失败，沿用上一次拟合: {message}[/yellow]")
            carried[i] = True
        else:
            last = ThetaTau.from_vector(tau, vector)
        lags = series.values[t - p : t][::-1]
        forecasts[i] = cond_quantile(last, lags)

    actuals = series.values[targets]
    return HitSequence(
        hits=actuals < forecasts,
        tau=tau,
        forecasts=forecasts,
        actuals=actuals,
        targets=targets,
        carried=carried,
    )
