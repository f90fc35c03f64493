"""命令行输出：csv / json / 对齐表格，以及写文件"""
import csv
import io
import json
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from exceptions import OutputError


class OutputFormat(str, Enum):
    """输出格式"""

    CSV = "csv"
    JSON = "json"
    TABLE = "table"


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "PASS" if value else "FAIL"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render_rows(
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    fmt: OutputFormat,
    title: Optional[str] = None,
) -> str:
    """
    渲染一组等长记录

    Args:
        columns: 列名
        rows: 数据行
        fmt: 输出格式
        title: 表格模式下的标题

    Returns:
        str: 以换行结尾的文本
    """
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buffer.getvalue()

    if fmt is OutputFormat.JSON:
        records = [dict(zip(columns, row)) for row in rows]
        return json.dumps(records, indent=2, ensure_ascii=False) + "\n"

    cells = [[_cell(v) for v in row] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = []
    if title:
        lines.append(title)
        lines.append("=" * 40)
    lines.append("  ".join(c.rjust(w) for c, w in zip(columns, widths)))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"


def render_record(record: Mapping[str, Any], fmt: OutputFormat, title: Optional[str] = None) -> str:
    """渲染单条键值记录，csv 模式为 key,value 两列"""
    if fmt is OutputFormat.JSON:
        return json.dumps(record, indent=2, ensure_ascii=False) + "\n"
    scalar = [(k, v) for k, v in record.items() if not isinstance(v, (dict, list, tuple))]
    if fmt is OutputFormat.CSV:
        return render_rows(("key", "value"), scalar, fmt)
    width = max((len(k) for k, _ in scalar), default=0)
    lines = []
    if title:
        lines.append(title)
        lines.append("=" * 40)
    lines.extend(f"{k.ljust(width)} : {_cell(v)}" for k, v in scalar)
    for k, v in record.items():
        if isinstance(v, dict) and v:
            lines.append(f"{k}:")
            lines.extend(f"  {sub}: {_cell(val)}" for sub, val in v.items())
    return "\n".join(lines) + "\n"


def write_output(text: str, path: Path) -> None:
    """
    写入数据文件

    Raises:
        OutputError: 目录无法创建或文件无法写入
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"写入 {path} 失败: {e}") from e
