"""
选阶模块 - 单水平与组合 BIC
"""

from .bic import BicTable, bic_at_level, bic_formula, level_grid, level_loss, select_order

__all__ = [
    "BicTable",
    "bic_at_level",
    "bic_formula",
    "level_grid",
    "level_loss",
    "select_order",
]
