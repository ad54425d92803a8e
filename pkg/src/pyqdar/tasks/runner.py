"""
重复实验执行框架 - 进程池并行与实时状态监控
"""

from __future__ import annotations

import time
from concurrent.futures import Future, ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from rich.console import Console
from rich.live import Live

from ..errors import QdarError
from ..utils import derive_seed
from .display import create_status_table

console = Console()

ReplicationTask = Callable[[int, np.random.SeedSequence], Dict[str, Any]]


@dataclass
class ReplicationRecord:
    """单次重复的结果"""

    index: int
    ok: bool
    values: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class StudyProgress:
    """一次研究的进度（供状态表使用）"""

    name: str
    total: int
    done: int = 0
    failed: int = 0
    started: float = field(default_factory=time.monotonic)

    @property
    def status(self) -> str:
        if self.done >= self.total:
            return "完成"
        return "运行中"

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.started


def _run_one(task: ReplicationTask, index: int, seed: np.random.SeedSequence) -> ReplicationRecord:
    try:
        return ReplicationRecord(index, True, task(index, seed))
    except (QdarError, ValueError, ArithmeticError, RuntimeError) as exc:
        return ReplicationRecord(index, False, error=f"{type(exc).__name__}: {exc}")


def run_replications(
    task: ReplicationTask,
    reps: int,
    seed: int | None,
    workers: int = 1,
    name: str = "replications",
    show_monitor: bool = True,
) -> List[ReplicationRecord]:
    """
    并行运行重复实验并实时监控

    第 i 次重复的种子为 derive_seed(seed, i)，结果按重复序号排序，
    因此汇总与进程调度无关。

    Args:
        task: 可 pickle 的任务函数 task(index, seed_sequence) -> dict
        reps: 重复次数
        seed: 主种子
        workers: 进程数（1 表示在当前进程内顺序执行）
        name: 状态表中显示的研究名
        show_monitor: 是否显示实时状态表

    Returns:
        按序号排序的 ReplicationRecord 列表

    Example:
        >>> task = functools.partial(estimation_task, design="dar-const", n=1000, tau=0.25)
        >>> records = run_replications(task, reps=200, seed=7, workers=8)
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    seeds = [derive_seed(seed, i) for i in range(reps)]
    progress = StudyProgress(name, reps)
    records: List[ReplicationRecord] = []

    def collect(record: ReplicationRecord, live: Live | None) -> None:
        records.append(record)
        progress.done += 1
        if not record.ok:
            progress.failed += 1
        if live is not None:
            live.update(create_status_table([progress]))

    live_ctx = Live(create_status_table([progress]), refresh_per_second=4, console=console) if show_monitor else None
    if live_ctx is not None:
        live_ctx.start()
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures: List[Future] = [
                    executor.submit(_run_one, task, i, s) for i, s in enumerate(seeds)
                ]
                for future in as_completed(futures):
                    collect(future.result(), live_ctx)
        else:
            for i, s in enumerate(seeds):
                collect(_run_one(task, i, s), live_ctx)
    finally:
        if live_ctx is not None:
            live_ctx.stop()

    records.sort(key=lambda r: r.index)
    if progress.failed:
        console.print(f"[yellow]⚠ {name}: {progress.failed}/{reps} 次重复失败[/yellow]")
    console.print(f"[bold green]✓ {name}: {reps - progress.failed}/{reps} 次重复完成 ({progress.elapsed:.1f}s)[/bold green]")
    return records
