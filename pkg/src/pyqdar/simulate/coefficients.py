"""
系数函数与双自回归（DAR）嵌入

CoefficientFunctions 把 b(·)、φ_i(·)、β_j(·) 作为 (0,1) 上的向量化函数保存，
from_double_ar 把经典 DAR 模型嵌入为 QDAR 的特例。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from ..core import ThetaTau, s_q_inv

CoefFn = Callable[[np.ndarray], np.ndarray]

_GRID = np.linspace(0.001, 0.999, 999)


def _evaluate(fn: CoefFn, u: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(u), dtype=float), u.shape)


def constant(value: float) -> CoefFn:
    """常数系数函数"""
    return lambda u: np.full(np.shape(u), float(value))


@dataclass(frozen=True)
class Innovation:
    """
    新息分布（只用于分位函数）

    Args:
        family: "normal" 或 "t"
        df: t 分布自由度（family="t" 时必填）
    """

    family: str = "normal"
    df: float | None = None

    def __post_init__(self) -> None:
        if self.family not in ("normal", "t"):
            raise ValueError(f"innovation family must be normal or t, got {self.family!r}")
        if self.family == "t" and (self.df is None or self.df <= 0):
            raise ValueError(f"student t innovation needs df > 0, got {self.df}")

    @classmethod
    def normal(cls) -> Innovation:
        return cls("normal")

    @classmethod
    def student_t(cls, df: float) -> Innovation:
        return cls("t", float(df))

    @classmethod
    def parse(cls, name: str) -> Innovation:
        """解析 "normal" / "t5" / "t3" 这类名称"""
        name = name.strip().lower()
        if name in ("normal", "n", "gaussian"):
            return cls.normal()
        if name.startswith("t"):
            try:
                return cls.student_t(float(name[1:]))
            except ValueError:
                pass
        raise ValueError(f"innovation must be normal or t<df>, got {name!r}")

    @property
    def label(self) -> str:
        return "normal" if self.family == "normal" else f"t{self.df:g}"

    def ppf(self, u: np.ndarray | float) -> np.ndarray | float:
        if self.family == "normal":
            return stats.norm.ppf(u)
        return stats.t.ppf(u, self.df)


@dataclass(frozen=True)
class CoefficientFunctions:
    """
    QDAR 数据生成过程的系数曲线

    Args:
        b_fn: b(τ)
        phi_fns: φ_1(τ)..φ_p(τ)
        beta_fns: β_1(τ)..β_p(τ)
        description: 来源说明
    """

    b_fn: CoefFn
    phi_fns: tuple[CoefFn, ...]
    beta_fns: tuple[CoefFn, ...]
    description: str = ""
    innovation: Innovation | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi_fns", tuple(self.phi_fns))
        object.__setattr__(self, "beta_fns", tuple(self.beta_fns))
        if len(self.phi_fns) != len(self.beta_fns) or not self.phi_fns:
            raise ValueError(
                f"phi_fns and beta_fns must have equal length p >= 1, "
                f"got {len(self.phi_fns)} and {len(self.beta_fns)}"
            )

    @property
    def p(self) -> int:
        return len(self.phi_fns)

    def evaluate(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        在 u 上求值

        Returns:
            (b, phi, beta)，b 形状 (m,)，phi/beta 形状 (p, m)
        """
        u = np.asarray(u, dtype=float)
        b = _evaluate(self.b_fn, u)
        phi = np.vstack([_evaluate(f, u) for f in self.phi_fns])
        beta = np.vstack([_evaluate(f, u) for f in self.beta_fns])
        return b, phi, beta

    def theta_at(self, tau: float) -> ThetaTau:
        """真实参数 θ_τ"""
        b, phi, beta = self.evaluate(np.array([tau]))
        return ThetaTau(tau, phi[:, 0], b[0], beta[:, 0])

    def is_finite(self) -> bool:
        b, phi, beta = self.evaluate(_GRID)
        return bool(np.all(np.isfinite(b)) and np.all(np.isfinite(phi)) and np.all(np.isfinite(beta)))

    @property
    def is_monotone(self) -> bool:
        """b 与全部 β_j 在网格上单调不减"""
        b, _, beta = self.evaluate(_GRID)
        return bool(np.all(np.diff(b) >= 0) and np.all(np.diff(beta, axis=1) >= 0))


@dataclass(frozen=True)
class DoubleArSpec:
    """
    DAR 模型 y_t = Σφ_i y_{t-i} + ε_t √(ω + Σβ_j y²_{t-j})

    Args:
        phi: φ_1..φ_p
        omega: ω > 0
        beta: β_1..β_p ≥ 0
        innovation: ε_t 的分布
    """

    phi: tuple[float, ...]
    omega: float
    beta: tuple[float, ...]
    innovation: Innovation = Innovation()

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        if len(self.phi) != len(self.beta) or not self.phi:
            raise ValueError("phi and beta must have equal length p >= 1")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if any(b < 0 for b in self.beta):
            raise ValueError(f"beta must be >= 0, got {self.beta}")


def from_double_ar(spec: DoubleArSpec) -> CoefficientFunctions:
    """
    DAR 嵌入：b(τ) = S_Q⁻¹(b_τ√ω)，φ_i(τ) = φ_i，β_j(τ) = b(τ)β_j/ω

    b_τ 是新息的 τ 分位数（t 分布不做方差标准化）。

    Example:
        >>> coefs = from_double_ar(DoubleArSpec((-0.2,), 1.0, (0.4,)))
        >>> theta = coefs.theta_at(0.05)
        >>> round(theta.b, 3), round(theta.beta[0], 3)
        (-2.706, -1.082)
    """
    innovation = spec.innovation
    root = np.sqrt(spec.omega)

    def b_fn(u: np.ndarray) -> np.ndarray:
        return s_q_inv(innovation.ppf(u) * root)

    def scaled(beta_j: float) -> CoefFn:
        return lambda u: b_fn(u) * beta_j / spec.omega

    return CoefficientFunctions(
        b_fn=b_fn,
        phi_fns=tuple(constant(v) for v in spec.phi),
        beta_fns=tuple(scaled(v) for v in spec.beta),
        description=f"dar(phi={list(spec.phi)}, omega={spec.omega}, beta={list(spec.beta)}, {innovation.label})",
        innovation=innovation,
    )


def from_table(frame: pd.DataFrame, description: str = "table") -> CoefficientFunctions:
    """
    用户提供的系数表（列 tau, b, phi1..phip, beta1..betap），按 τ 线性插值

    Raises:
        ValueError: 缺列或 tau 不严格递增
    """
    if "tau" not in frame.columns or "b" not in frame.columns:
        raise ValueError(f"coefficient table needs tau and b columns, got {list(frame.columns)}")
    p = sum(1 for c in frame.columns if str(c).startswith("phi"))
    missing = [f"{k}{j}" for k in ("phi", "beta") for j in range(1, p + 1) if f"{k}{j}" not in frame.columns]
    if p < 1 or missing:
        raise ValueError(f"coefficient table must have phi1..phip and beta1..betap, missing {missing}")
    tau = frame["tau"].to_numpy(dtype=float)
    if np.any(np.diff(tau) <= 0):
        raise ValueError("coefficient table tau column must be strictly increasing")

    def interp(column: Sequence[float]) -> CoefFn:
        ys = np.asarray(column, dtype=float)
        return lambda u: np.interp(u, tau, ys)

    return CoefficientFunctions(
        b_fn=interp(frame["b"]),
        phi_fns=tuple(interp(frame[f"phi{j}"]) for j in range(1, p + 1)),
        beta_fns=tuple(interp(frame[f"beta{j}"]) for j in range(1, p + 1)),
        description=description,
    )
