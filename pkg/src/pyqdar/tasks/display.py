"""
研究进度与结果显示 - Rich 表格生成工具
"""

from __future__ import annotations

from typing import TYPE_CHECKING, List

import pandas as pd
from rich.table import Table

if TYPE_CHECKING:
    from .runner import StudyProgress


def create_status_table(progress: List[StudyProgress]) -> Table:
    """
    创建重复实验状态监控表格

    Args:
        progress: StudyProgress 列表

    Returns:
        Rich Table 对象
    """
    table = Table(title="[bold bright_cyan]重复实验进度[/bold bright_cyan]", show_header=True)
    table.add_column("研究", style="bright_yellow", width=24)
    table.add_column("状态", style="bold", width=8)
    table.add_column("完成", style="bright_green", width=12)
    table.add_column("失败", style="bright_red", width=6)
    table.add_column("耗时", style="bright_cyan", width=10)

    for item in progress:
        status_color = "bright_green" if item.status == "完成" else "bright_yellow"
        table.add_row(
            item.name,
            f"[{status_color}]{item.status}[/{status_color}]",
            f"{item.done}/{item.total}",
            str(item.failed) if item.failed else "[dim]0[/dim]",
            f"{item.elapsed:.1f}s",
        )
    return table


def create_frame_table(frame: pd.DataFrame, title: str, digits: int = 4) -> Table:
    """
    把 DataFrame 渲染为 Rich 表格（浮点按 digits 位有效数字显示）

    Example:
        >>> console.print(create_frame_table(study.table, "估计研究"))
    """
    table = Table(title=f"[bold bright_cyan]{title}[/bold bright_cyan]", show_header=True)
    for column in frame.columns:
        table.add_column(str(column), style="bright_green" if column != frame.columns[0] else "bright_yellow")
    for row in frame.itertuples(index=False):
        cells = []
        for value in row:
            if isinstance(value, float):
                cells.append("[dim]N/A[/dim]" if pd.isna(value) else f"{value:.{digits}g}")
            else:
                cells.append(str(value))
        table.add_row(*cells)
    return table
