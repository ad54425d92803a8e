"""
自加权条件分位估计

θ̂_τ = argmin_θ Σ w_t ρ_τ(y_t − q_t(θ))

每个起点先跑 Nelder–Mead 单纯形（精确的非光滑目标），
最优解再用 BFGS 以 ψ_τ 诱导的次梯度精修，仅在目标下降时采用。
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import statsmodels.api as sm
from rich.console import Console
from scipy import optimize
from statsmodels.tools.sm_exceptions import ConvergenceWarning, IterationLimitWarning

from ..config import MIN_ROWS_PER_PARAM, NEAR_MEDIAN
from ..core import (
    SeriesSample,
    ThetaTau,
    WeightScheme,
    check_loss,
    cond_quantile,
    cond_quantile_jacobian,
    lag_matrix,
    psi,
    s_q,
    s_q_inv,
    self_weights,
)
from ..errors import DegenerateSeriesError, DidNotConvergeError, InsufficientDataError
from ..utils import make_rng
from .bandwidth import BandwidthRule, bandwidth
from .covariance import asymptotic_covariance, density_quotient
from .result import BandwidthInfo, FitOptions, FitResult

console = Console()


@dataclass
class _Problem:
    """一次拟合的数据：响应、滞后、权重"""

    tau: float
    y: np.ndarray
    X: np.ndarray
    w: np.ndarray
    fix_beta_zero: bool
    floor: float

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def dim(self) -> int:
        return self.p + 1 if self.fix_beta_zero else 2 * self.p + 1

    def full(self, x: np.ndarray) -> np.ndarray:
        if self.fix_beta_zero:
            return np.concatenate([x, np.zeros(self.p)])
        return x

    def path(self, x: np.ndarray) -> np.ndarray:
        p = self.p
        phi, b = x[:p], x[p]
        h = b if self.fix_beta_zero else b + (self.X**2) @ x[p + 1 :]
        return self.X @ phi + s_q(h)

    def objective(self, x: np.ndarray) -> float:
        return float(self.w @ check_loss(self.y - self.path(x), self.tau))

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        theta = ThetaTau.from_vector(self.tau, self.full(x))
        Q = cond_quantile_jacobian(theta, self.X, self.floor)[:, : self.dim]
        return -(self.w * psi(self.y - self.path(x), self.tau)) @ Q


@dataclass
class _StartOutcome:
    x: np.ndarray
    value: float
    initial_value: float
    converged: bool


def linear_start(problem: _Problem) -> np.ndarray:
    """
    第 1 个起点

    φ 取加权线性分位回归 y_t ~ 1 + 滞后 的斜率；b = S_Q⁻¹(残差的 τ 分位数)；
    β_j = ±0.05，符号为 sign(b)·sign(残差平方对滞后平方的 OLS 斜率)。
    """
    y, X, w, tau = problem.y, problem.X, problem.w, problem.tau
    design = sm.add_constant(X, has_constant="add")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IterationLimitWarning)
            warnings.simplefilter("ignore", ConvergenceWarning)
            warnings.simplefilter("ignore", RuntimeWarning)
            phi = sm.QuantReg(w * y, design * w[:, None]).fit(q=tau, max_iter=2000).params[1:]
        if not np.all(np.isfinite(phi)):
            raise ValueError("non-finite start")
    except (ValueError, np.linalg.LinAlgError):
        phi = np.zeros(problem.p)

    e = y - X @ phi
    b = float(s_q_inv(np.quantile(e, tau)))
    if problem.fix_beta_zero:
        return np.concatenate([phi, [b]])

    sq = X**2
    slope = np.linalg.lstsq(sm.add_constant(sq, has_constant="add"), e**2, rcond=None)[0][1:]
    sign_b = np.sign(b) if b != 0 else -1.0 if tau < 0.5 else 1.0
    beta = 0.05 * sign_b * np.where(slope >= 0, 1.0, -1.0)
    return np.concatenate([phi, [b], beta])


def start_points(problem: _Problem, n_starts: int, seed: int | None) -> list[np.ndarray]:
    """线性起点 + (n_starts − 1) 个由 (seed, k) 派生的随机扰动"""
    x0 = linear_start(problem)
    points = [x0]
    scale = 0.5 * np.abs(x0) + 0.1
    for k in range(1, n_starts):
        rng = make_rng(seed, k)
        points.append(x0 + scale * rng.standard_normal(x0.size))
    return points


def _run_start(problem: _Problem, x0: np.ndarray, opts: FitOptions) -> _StartOutcome:
    initial = problem.objective(x0)
    maxiter = opts.iterations(problem.p)
    result = optimize.minimize(
        problem.objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": maxiter,
            "maxfev": 2 * maxiter,
            "xatol": opts.xatol,
            "fatol": opts.rel_tol * max(initial, np.finfo(float).tiny),
            "adaptive": problem.dim > 3,
        },
    )
    x, value = np.asarray(result.x), float(result.fun)
    if value > initial:
        x, value = x0, initial
    return _StartOutcome(x, value, initial, bool(result.success))


def _polish(problem: _Problem, best: _StartOutcome, opts: FitOptions) -> _StartOutcome:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = optimize.minimize(
            problem.objective,
            best.x,
            jac=problem.subgradient,
            method="BFGS",
            options={"maxiter": 50 * problem.dim, "gtol": 1e-10},
        )
    value = float(result.fun)
    if np.all(np.isfinite(result.x)) and value < best.value:
        return _StartOutcome(np.asarray(result.x), value, best.initial_value, best.converged)
    return best


def _validate(series: SeriesSample, tau: float, p: int, start: int) -> None:
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must be in range (0, 1), got {tau}")
    if p < 1:
        raise ValueError(f"order p must be >= 1, got {p}")
    if start < p:
        raise ValueError(f"start ({start}) must be >= p ({p})")
    rows = series.n - start
    need = MIN_ROWS_PER_PARAM * (2 * p + 1)
    if rows < need:
        raise InsufficientDataError(
            f"{rows} usable rows for order {p}, need at least {need}"
        )
    if np.ptp(series.values) == 0:
        raise DegenerateSeriesError("series is constant")


def fit(
    series: SeriesSample,
    tau: float,
    p: int,
    scheme: WeightScheme | None = None,
    opts: FitOptions | None = None,
    start: int | None = None,
) -> FitResult:
    """
    自加权条件分位估计（多起点）

    Args:
        series: 观测序列
        tau: 分位水平
        p: 阶数
        scheme: 加权方案（默认三次自加权，深度 p）
        opts: 拟合选项
        start: 首个响应前的观测数（默认 max(p, 权重深度)），BIC 用 p_max

    Returns:
        FitResult，loss = 目标值 / (n − start)

    Raises:
        InsufficientDataError: n − start < 10(2p+1)
        DegenerateSeriesError: 序列为常数
        DidNotConvergeError: 所有起点都未满足停止准则（且 require_convergence）

    Example:
        >>> result = fit(series, 0.25, 1, opts=FitOptions(seed=7))
        >>> result.theta.phi, result.asd
    """
    scheme = scheme or WeightScheme()
    opts = opts or FitOptions()
    start = max(p, scheme.depth(p)) if start is None else start
    _validate(series, tau, p, start)

    if opts.warn_near_median and NEAR_MEDIAN[0] < tau < NEAR_MEDIAN[1]:
        console.print(
            f"[yellow]⚠ τ={tau:g} 接近 0.5，b(τ)、β(τ) 接近 0 时估计可能不可靠[/yellow]"
        )

    y, X = lag_matrix(series.values, p, start)
    w = np.asarray(self_weights(series, p, scheme, start=start))
    problem = _Problem(tau, y, X, w, opts.fix_beta_zero, opts.grad_floor)

    points = start_points(problem, opts.n_starts, opts.seed)
    if opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as executor:
            outcomes = list(executor.map(lambda x0: _run_start(problem, x0, opts), points))
    else:
        outcomes = [_run_start(problem, x0, opts) for x0 in points]

    any_converged = any(o.converged for o in outcomes)
    if not any_converged and opts.require_convergence:
        raise DidNotConvergeError(
            f"none of {len(points)} starts converged at tau={tau:g}, p={p}"
        )
    best = min(outcomes, key=lambda o: o.value)
    if opts.polish:
        best = _polish(problem, best, opts)

    m = series.n - start
    result = FitResult(
        theta=ThetaTau.from_vector(tau, problem.full(best.x)),
        loss=best.value / m,
        converged=any_converged,
        starts_tried=len(points),
        weights=scheme,
        n=series.n,
        start=start,
        seed=opts.seed,
        start_points=[pt.tolist() for pt in points],
        fix_beta_zero=opts.fix_beta_zero,
    )
    if opts.covariance:
        attach_covariance(series, result, opts)
    return result


def attach_covariance(
    series: SeriesSample,
    result: FitResult,
    opts: FitOptions,
    rule: BandwidthRule | str | None = None,
) -> FitResult:
    """
    拟合 τ ± h 两侧，估计密度与协方差，并写回 result

    Args:
        series: 观测序列
        result: τ 处的拟合
        opts: 拟合选项（两侧拟合沿用，关闭协方差）
        rule: 带宽规则，默认 opts.bandwidth

    Returns:
        同一个 result（已填充 covariance/asd/bandwidth/omega0/omega1/ridge/density）
    """
    rule = BandwidthRule.parse(rule or opts.bandwidth)
    h = bandwidth(result.tau, series.n, rule, opts.alpha)
    side = opts.but(covariance=False, warn_near_median=False, require_convergence=False)
    lo = fit(series, result.tau - h, result.p, result.weights, side, start=result.start)
    hi = fit(series, result.tau + h, result.p, result.weights, side, start=result.start)
    fhat = density_quotient(series, lo, hi)
    sandwich = asymptotic_covariance(series, result, fhat, opts.grad_floor)

    result.covariance = sandwich.matrix
    result.asd = sandwich.asd
    result.bandwidth = BandwidthInfo(rule, h)
    result.omega0 = sandwich.omega0
    result.omega1 = sandwich.omega1
    result.ridge = sandwich.ridge
    result.density = fhat
    return result


def forecast_one_step(result: FitResult, last_values: np.ndarray) -> float:
    """
    一步预测 Q̂_τ(y_{n+1} | F_n) = q_{n+1}(θ̂)

    Args:
        result: 拟合结果
        last_values: 最近 p 个观测，最近优先 (y_n, y_{n-1}, ...)
    """
    return cond_quantile(result.theta, last_values)
