"""
pyqdar 通用工具函数

包含：
- JSON 消息美化打印
- CSV 序列读取
- JSON / CSV 产物写出与配置回读
- 随机种子派生
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.syntax import Syntax

from .config import SPEC_VERSION, check_spec_version
from .core import SeriesSample
from .errors import CsvParseError

console = Console()


def print_json_message(title: str, data: Dict[str, Any], color: str = "cyan") -> None:
    """
    美化打印 JSON 消息

    Args:
        title: 标题
        data: JSON 数据（dict，可含 numpy 值）
        color: 边框颜色

    Example:
        >>> print_json_message("拟合结果", fit.to_dict(), "green")
    """
    json_str = json.dumps(to_jsonable(data), indent=2, ensure_ascii=False)
    syntax = Syntax(json_str, "json", theme="monokai", line_numbers=False)
    panel = Panel(
        syntax,
        title=f"[bold {color}]{title}[/bold {color}]",
        border_style=color,
        padding=(1, 2),
    )
    console.print("\n")
    console.print(panel)


def to_jsonable(obj: Any) -> Any:
    """把 numpy 数组/标量、dataclass 字典等递归转换为 JSON 可序列化对象"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


# ========== 随机种子 ==========


def derive_seed(master: int | None, *key: int) -> np.random.SeedSequence:
    """
    从主种子和整数索引派生子种子

    同一 (master, key) 总是得到相同的子种子，与调度顺序无关。

    Example:
        >>> rng = np.random.default_rng(derive_seed(7, 3, 1))
    """
    return np.random.SeedSequence(entropy=master, spawn_key=tuple(int(k) for k in key))


def make_rng(master: int | None, *key: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *key))


# ========== CSV 读取 ==========


def _is_numberlike(name: str) -> bool:
    try:
        float(name)
    except ValueError:
        return False
    return True


def _data_lines(path: Path) -> list[int]:
    """表头和数据行在文件中的物理行号（从 1 开始），跳过空行和注释行"""
    with path.open(encoding="utf-8", errors="replace") as handle:
        return [no for no, text in enumerate(handle, start=1) if text.split("#", 1)[0].strip()]


def load_series(path: str | Path, column: str | None = None) -> SeriesSample:
    """
    读取单列数值序列

    规则：必须有表头；只接受小数点；以 '#' 开头的行是注释；
    非数值列（如日期）会被忽略并提示。

    Args:
        path: CSV 文件路径
        column: 指定数值列名（默认自动选择唯一的数值列）

    Returns:
        SeriesSample

    Raises:
        FileNotFoundError: 文件不存在
        CsvParseError: 缺表头、列不唯一、含非数值或 NaN/Inf，消息中给出文件中的物理行号和列名
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")

    try:
        frame = pd.read_csv(path, comment="#", dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise CsvParseError(f"{path}: file has no header") from None
    except pd.errors.ParserError as exc:
        raise CsvParseError(f"{path}: {exc}") from None

    if any(_is_numberlike(str(c)) for c in frame.columns):
        raise CsvParseError(f"{path}: header row required, got {list(frame.columns)}", row=_data_lines(path)[0])

    if column is not None:
        if column not in frame.columns:
            raise CsvParseError(f"{path}: column {column!r} not found", column=column)
        chosen = column
    else:
        numeric = []
        for name in frame.columns:
            parsed = pd.to_numeric(frame[name].str.strip(), errors="coerce")
            if parsed.notna().sum() > 0 or frame[name].isna().all():
                numeric.append(name)
        if len(numeric) != 1:
            raise CsvParseError(
                f"{path}: expected exactly one numeric column, found {numeric}"
            )
        chosen = numeric[0]
        ignored = [c for c in frame.columns if c != chosen]
        if ignored:
            console.print(f"[dim]忽略非数值列: {', '.join(map(str, ignored))}[/dim]")

    raw = frame[chosen]
    lines = _data_lines(path)
    values = np.empty(len(raw))
    for i, text in enumerate(raw):
        line = lines[i + 1] if i + 1 < len(lines) else i + 2
        try:
            value = float(str(text).strip())
        except ValueError:
            raise CsvParseError(
                f"{path}: line {line}, column {chosen!r}: cannot parse {text!r}",
                row=line,
                column=str(chosen),
            ) from None
        if not math.isfinite(value):
            raise CsvParseError(
                f"{path}: line {line}, column {chosen!r}: non-finite value {text!r}",
                row=line,
                column=str(chosen),
            )
        values[i] = value

    return SeriesSample(values, origin=str(path))


# ========== 产物写出 ==========


def _header(command: str, config: Dict[str, Any], seed: int | None) -> Dict[str, Any]:
    return {
        "spec_version": SPEC_VERSION,
        "command": command,
        "config": to_jsonable(config),
        "seed": seed,
    }


def write_json_artifact(
    path: str | Path,
    payload: Dict[str, Any],
    *,
    command: str,
    config: Dict[str, Any],
    seed: int | None,
) -> Path:
    """
    写出 JSON 产物（嵌入 spec_version、命令、完整配置和种子）

    created_at 是唯一与运行时间有关的字段。
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = _header(command, config, seed)
    document["created_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    document["result"] = to_jsonable(payload)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def write_csv_artifact(
    path: str | Path,
    frame: pd.DataFrame,
    *,
    command: str,
    config: Dict[str, Any],
    seed: int | None,
) -> Path:
    """写出 CSV 产物，前置 '#' 注释行回显配置（不含时间戳）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _header(command, config, seed)
    lines = [f"# {key}: {json.dumps(value, sort_keys=True)}" for key, value in header.items()]
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
        frame.to_csv(fh, index=False, lineterminator="\n")
    return path


def read_artifact_config(path: str | Path) -> Dict[str, Any]:
    """
    从 JSON 或 CSV 产物中读取嵌入的配置

    Raises:
        ValueError: 找不到配置或 spec_version 不兼容
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        document = json.loads(text)
    else:
        document = {}
        for line in text.splitlines():
            if not line.startswith("# "):
                break
            key, _, value = line[2:].partition(": ")
            document[key] = json.loads(value)
    if "config" not in document:
        raise ValueError(f"{path}: no embedded config")
    check_spec_version(document.get("spec_version", "0"))
    return document["config"]
