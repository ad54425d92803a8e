"""
异常定义

所有领域异常都继承自 QdarError，同时继承最接近的内置异常，
调用方既可以统一捕获 QdarError，也可以按 ValueError / RuntimeError 捕获。
"""


class QdarError(Exception):
    """pyqdar 所有领域异常的基类"""


class NonFiniteError(QdarError, ArithmeticError):
    """模拟递推溢出（参数化发散）"""


class DegenerateSeriesError(QdarError, ValueError):
    """序列为常数，无法估计"""


class InsufficientDataError(QdarError, ValueError):
    """样本量不足以完成拟合或滞后窗口为空"""


class CsvParseError(QdarError, ValueError):
    """CSV 解析失败，消息中包含行号和列名"""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class DidNotConvergeError(QdarError, RuntimeError):
    """所有起点都未满足停止准则"""


class SingularInformationError(QdarError, RuntimeError):
    """Ω̂₁ 加岭后仍然无法求逆"""


class RankDeficientError(QdarError, RuntimeError):
    """DQ 回归设计矩阵秩亏"""


class UnknownDesignError(QdarError, KeyError):
    """未知的模拟设计名称"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown design"
