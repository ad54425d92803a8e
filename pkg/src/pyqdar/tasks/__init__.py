"""
任务模块 - 重复实验执行、Monte-Carlo 研究与结果表格
"""

from .runner import ReplicationRecord, StudyProgress, run_replications
from .display import create_frame_table, create_status_table
from .studies import (
    STUDIES,
    StudyResult,
    estimation_study,
    portmanteau_study,
    qacf_study,
    selection_study,
    weights_study,
)

__all__ = [
    "ReplicationRecord",
    "StudyProgress",
    "run_replications",
    "create_frame_table",
    "create_status_table",
    "STUDIES",
    "StudyResult",
    "estimation_study",
    "portmanteau_study",
    "qacf_study",
    "selection_study",
    "weights_study",
]
