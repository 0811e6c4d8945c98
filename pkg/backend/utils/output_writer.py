# 输出写入模块（JSON / CSV）
import csv
import json
import math
import os
from enum import Enum
from typing import Any, Iterable, List, Sequence

import numpy as np

FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    """17 位有效数字的浮点文本，非有限值写为 null"""
    value = float(value)
    if not math.isfinite(value):
        return "null"
    return format(value, FLOAT_FORMAT)


def _normalize(obj: Any) -> Any:
    """把 numpy 标量/数组、枚举和带 to_dict 的对象转成 JSON 基本类型"""
    if hasattr(obj, "to_dict"):
        return _normalize(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.name
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end_pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end_pad + "]"
    raise TypeError(f"无法序列化的类型: {type(obj)}")


def to_json_text(obj: Any, indent: int = 2) -> str:
    """稳定的 JSON 文本：键排序，浮点 17 位有效数字"""
    return _encode(_normalize(obj), indent, 0) + "\n"


def write_json(path: str, obj: Any) -> str:
    """写 JSON 文件并返回路径"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_json_text(obj))
    return path


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """写 CSV 文件，浮点列按 17 位有效数字输出

    Args:
        path: 输出路径
        header: 列名
        rows: 行数据

    Returns:
        输出路径
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = format_float(value)
        return "" if text == "null" else text
    if value is None:
        return ""
    return str(value)


def read_csv(path: str) -> List[dict]:
    """读回 CSV（测试与后处理使用）"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))
