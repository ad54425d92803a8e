"""
差商密度估计的带宽

h_B  = n^{-1/5} {4.5 f_N⁴(x) / (2x² + 1)²}^{1/5}
h_HS = n^{-1/3} z_α^{2/3} {1.5 f_N²(x) / (2x² + 1)}^{1/3}
其中 x = F_N⁻¹(τ)，z_α = F_N⁻¹(1 − α/2)。
"""

from __future__ import annotations

from enum import Enum

from scipy import stats

from ..config import BANDWIDTH_ALPHA, TAU_HIGH, TAU_LOW


class BandwidthRule(Enum):
    BOFINGER = "bofinger"
    HALL_SHEATHER = "hall-sheather"

    @classmethod
    def parse(cls, name: str | BandwidthRule) -> BandwidthRule:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower().replace("_", "-"))
        except ValueError:
            raise ValueError(
                f"bandwidth must be one of bofinger/hall-sheather, got {name!r}"
            ) from None


def bandwidth(
    tau: float,
    n: int,
    rule: BandwidthRule | str = BandwidthRule.HALL_SHEATHER,
    alpha: float = BANDWIDTH_ALPHA,
) -> float:
    """
    计算带宽 h

    结果截断为 h ≤ 0.99·min(τ − 0.001, 0.999 − τ)，保证 τ ± h 落在 (0.001, 0.999)。

    Args:
        tau: 分位水平，必须在 (0.001, 0.999) 内
        n: 样本量（≥ 2）
        rule: Bofinger 或 Hall–Sheather
        alpha: Hall–Sheather 的显著性水平

    Returns:
        正带宽

    Example:
        >>> round(bandwidth(0.5, 1000, "bofinger"), 4)
        0.1627
        >>> round(bandwidth(0.5, 1000, "hall-sheather"), 4)
        0.0972
    """
    if not TAU_LOW < tau < TAU_HIGH:
        raise ValueError(f"tau must be in range ({TAU_LOW}, {TAU_HIGH}), got {tau}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in range (0, 1), got {alpha}")

    rule = BandwidthRule.parse(rule)
    x = stats.norm.ppf(tau)
    f = stats.norm.pdf(x)
    if rule is BandwidthRule.BOFINGER:
        h = n ** (-0.2) * (4.5 * f**4 / (2 * x**2 + 1) ** 2) ** 0.2
    else:
        z = stats.norm.ppf(1 - alpha / 2)
        h = n ** (-1 / 3) * z ** (2 / 3) * (1.5 * f**2 / (2 * x**2 + 1)) ** (1 / 3)

    return float(min(h, 0.99 * (tau - TAU_LOW), 0.99 * (TAU_HIGH - tau)))
