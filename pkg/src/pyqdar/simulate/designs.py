"""
内置模拟设计

每个设计是一个构造函数 (innovation, **params) -> CoefficientFunctions，
b(τ) = S_Q⁻¹(F⁻¹(τ))，F 为所选新息分布。
"""

from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from ..core import s_q_inv
from ..errors import UnknownDesignError
from .coefficients import CoefficientFunctions, DoubleArSpec, Innovation, constant, from_double_ar

DesignBuilder = Callable[..., CoefficientFunctions]


def _b_fn(innovation: Innovation) -> Callable[[np.ndarray], np.ndarray]:
    return lambda u: s_q_inv(innovation.ppf(u))


def dar_const(innovation: Innovation) -> CoefficientFunctions:
    """φ = −0.2，β = 0.4·b(τ)，即 y_t = −0.2y_{t-1} + ε_t√(1 + 0.4y²_{t-1})"""
    coefs = from_double_ar(DoubleArSpec((-0.2,), 1.0, (0.4,), innovation))
    return CoefficientFunctions(
        coefs.b_fn, coefs.phi_fns, coefs.beta_fns, f"dar-const/{innovation.label}", innovation
    )


def dar_varying(innovation: Innovation) -> CoefficientFunctions:
    """φ(τ) = 0.5τ，β(τ) = 0.5τ·b(τ)"""
    b = _b_fn(innovation)
    return CoefficientFunctions(
        b_fn=b,
        phi_fns=(lambda u: 0.5 * np.asarray(u),),
        beta_fns=(lambda u: 0.5 * np.asarray(u) * b(u),),
        description=f"dar-varying/{innovation.label}",
        innovation=innovation,
    )


def _order2(innovation: Innovation, name: str, loc_varies: bool, scale2_varies: bool) -> CoefficientFunctions:
    b = _b_fn(innovation)

    def phi1(u):
        return 0.1 * np.asarray(u) if loc_varies else np.full(np.shape(u), 0.1)

    def beta1(u):
        return (0.1 * np.asarray(u) if loc_varies else 0.1) * b(u)

    def beta2(u):
        return (0.4 * np.asarray(u) if scale2_varies else 0.4) * b(u)

    return CoefficientFunctions(
        b_fn=b,
        phi_fns=(phi1, constant(0.3)),
        beta_fns=(beta1, beta2),
        description=f"{name}/{innovation.label}",
        innovation=innovation,
    )


def order2_const(innovation: Innovation) -> CoefficientFunctions:
    """φ = (0.1, 0.3)，β = (0.1b, 0.4b)"""
    return _order2(innovation, "order2-const", False, False)


def order2_loc(innovation: Innovation) -> CoefficientFunctions:
    """φ = (0.1τ, 0.3)，β = (0.1τb, 0.4b)"""
    return _order2(innovation, "order2-loc", True, False)


def order2_both(innovation: Innovation) -> CoefficientFunctions:
    """φ = (0.1τ, 0.3)，β = (0.1τb, 0.4τb)"""
    return _order2(innovation, "order2-both", True, True)


def misspec(innovation: Innovation, c1: float = 0.0, c2: float = 0.0) -> CoefficientFunctions:
    """
    y_t = c₁y_{t-2} + S_Q(b + 0.1b·y²_{t-1} + c₂b·y²_{t-2})

    拟合一阶模型时，c₁ ≠ 0 对应位置误设，c₂ ≠ 0 对应尺度误设，c₁ = c₂ = 0 用于检验水平。
    """
    b = _b_fn(innovation)
    return CoefficientFunctions(
        b_fn=b,
        phi_fns=(constant(0.0), constant(c1)),
        beta_fns=(lambda u: 0.1 * b(u), lambda u: c2 * b(u)),
        description=f"misspec(c1={c1:g},c2={c2:g})/{innovation.label}",
        innovation=innovation,
    )


def weights_varying(innovation: Innovation) -> CoefficientFunctions:
    """自加权对比设计：系数与 dar-varying 相同"""
    coefs = dar_varying(innovation)
    return CoefficientFunctions(
        coefs.b_fn, coefs.phi_fns, coefs.beta_fns, f"weights-varying/{innovation.label}", innovation
    )


def weights_linear(innovation: Innovation) -> CoefficientFunctions:
    """自加权对比设计：φ(τ) = 0.5τ，β(τ) = 0.8(τ − 0.5)"""
    return CoefficientFunctions(
        b_fn=_b_fn(innovation),
        phi_fns=(lambda u: 0.5 * np.asarray(u),),
        beta_fns=(lambda u: 0.8 * (np.asarray(u) - 0.5),),
        description=f"weights-linear/{innovation.label}",
        innovation=innovation,
    )


DESIGNS: Dict[str, DesignBuilder] = {
    "dar-const": dar_const,
    "dar-varying": dar_varying,
    "order2-const": order2_const,
    "order2-loc": order2_loc,
    "order2-both": order2_both,
    "misspec": misspec,
    "weights-varying": weights_varying,
    "weights-linear": weights_linear,
}

# 各设计的拟合阶数（misspec 按 1 阶拟合）
DESIGN_ORDERS: Dict[str, int] = {
    "dar-const": 1,
    "dar-varying": 1,
    "order2-const": 2,
    "order2-loc": 2,
    "order2-both": 2,
    "misspec": 1,
    "weights-varying": 1,
    "weights-linear": 1,
}

# 按模型方程编号的别名，与规范名等价
DESIGN_ALIASES: Dict[str, str] = {
    "eq8-set1": "dar-const",
    "eq8-set2": "dar-varying",
    "eq13-i": "order2-const",
    "eq13-ii": "order2-loc",
    "eq13-iii": "order2-both",
    "eq14": "misspec",
}
DESIGNS.update({alias: DESIGNS[name] for alias, name in DESIGN_ALIASES.items()})
DESIGN_ORDERS.update({alias: DESIGN_ORDERS[name] for alias, name in DESIGN_ALIASES.items()})


def canonical_design(name: str) -> str:
    """别名转换为规范设计名，其他名称原样返回"""
    return DESIGN_ALIASES.get(name, name)


def build_design(
    name: str,
    innovation: Innovation | str = "normal",
    **params: float,
) -> CoefficientFunctions:
    """
    按名称构造内置设计

    Args:
        name: 设计名，见 DESIGNS
        innovation: Innovation 或 "normal" / "t5" / "t3"
        **params: 设计参数（如 misspec 的 c1, c2）

    Raises:
        UnknownDesignError: 名称未注册

    Example:
        >>> coefs = build_design("misspec", "normal", c1=0.3)
    """
    if isinstance(innovation, str):
        innovation = Innovation.parse(innovation)
    try:
        builder = DESIGNS[name]
    except KeyError:
        raise UnknownDesignError(
            f"unknown design {name!r}, expected one of {sorted(DESIGNS)}"
        ) from None
    return builder(innovation, **params)
