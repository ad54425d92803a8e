"""
核心领域类型

ThetaTau: 单一分位水平 τ 上的参数向量 θ_τ = (φ', b, β')'
SeriesSample: 观测序列与来源信息
WeightScheme: 自加权方案
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np


def _check_tau(tau: float) -> None:
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must be in range (0, 1), got {tau}")


@dataclass(frozen=True, eq=False)
class ThetaTau:
    """
    分位水平 τ 上的 QDAR 参数

    向量排列顺序固定为 (φ_1..φ_p, b, β_1..β_p)，
    与 cond_quantile_grad 的梯度顺序一致。

    Args:
        tau: 分位水平，(0, 1)
        phi: 条件位置系数，长度 p
        b: 尺度截距
        beta: 条件尺度系数，长度 p
    """

    tau: float
    phi: np.ndarray
    b: float
    beta: np.ndarray

    def __post_init__(self) -> None:
        _check_tau(self.tau)
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float)).copy()
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float)).copy()
        if phi.ndim != 1 or beta.ndim != 1 or phi.size != beta.size or phi.size < 1:
            raise ValueError(
                f"phi and beta must be vectors of equal length p >= 1, "
                f"got {phi.shape} and {beta.shape}"
            )
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(beta)) and np.isfinite(self.b)):
            raise ValueError("theta entries must be finite")
        phi.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def p(self) -> int:
        return int(self.phi.size)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.phi, [self.b], self.beta])

    @classmethod
    def from_vector(cls, tau: float, vector: np.ndarray) -> ThetaTau:
        vector = np.asarray(vector, dtype=float)
        if vector.size % 2 != 1 or vector.size < 3:
            raise ValueError(f"parameter vector must have length 2p+1, got {vector.size}")
        p = (vector.size - 1) // 2
        return cls(tau=tau, phi=vector[:p], b=vector[p], beta=vector[p + 1 :])

    def to_dict(self) -> dict[str, Any]:
        return {"phi": self.phi.tolist(), "b": self.b, "beta": self.beta.tolist()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThetaTau):
            return NotImplemented
        return self.tau == other.tau and np.array_equal(self.as_vector(), other.as_vector())

    __hash__ = None  # type: ignore[assignment]


@dataclass(eq=False)
class SeriesSample:
    """
    单变量观测序列

    Args:
        values: 观测 y_1..y_n（按时间顺序）
        origin: 来源描述（文件路径或模拟种子）
    """

    values: np.ndarray
    origin: str = ""
    _weight_cache: dict[tuple, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).ravel().copy()
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise ValueError(f"series values must be finite, first bad index {int(bad[0])}")
        values.setflags(write=False)
        self.values = values

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def require_order(self, p: int) -> None:
        """检查样本长度足以在阶数 p 上拟合（n ≥ 2p+2）"""
        if self.n < 2 * p + 2:
            raise ValueError(f"series of length {self.n} is too short for order {p}")

    def scaled(self, factor: float, shift: float = 0.0) -> SeriesSample:
        return SeriesSample(self.values * factor + shift, origin=f"{self.origin}*{factor}+{shift}")

    def last_values(self, p: int) -> np.ndarray:
        """最近 p 个观测，按最近优先排列"""
        if p > self.n:
            raise ValueError(f"need {p} values, series has {self.n}")
        return self.values[::-1][:p].copy()


class WeightKind(Enum):
    CUBIC = "cubic"
    UNIT = "unit"


@dataclass(frozen=True)
class WeightScheme:
    """
    自加权方案

    Args:
        kind: CUBIC 时 w_t = 1/(1+Σ|y_{t-i}|³)，UNIT 时 w_t = 1
        order: 权重分母使用的滞后深度，None 表示与拟合阶数相同
    """

    kind: WeightKind = WeightKind.CUBIC
    order: int | None = None

    @classmethod
    def cubic(cls, order: int | None = None) -> WeightScheme:
        return cls(WeightKind.CUBIC, order)

    @classmethod
    def unit(cls) -> WeightScheme:
        return cls(WeightKind.UNIT, None)

    @classmethod
    def parse(cls, name: str, order: int | None = None) -> WeightScheme:
        try:
            kind = WeightKind(name.lower())
        except ValueError:
            raise ValueError(f"weights must be one of cubic/unit, got {name!r}") from None
        return cls(kind, order)

    def with_order(self, order: int) -> WeightScheme:
        return WeightScheme(self.kind, order)

    def depth(self, p: int) -> int:
        return p if self.order is None else self.order
