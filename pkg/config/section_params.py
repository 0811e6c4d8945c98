# 子命令参数读取
from typing import Any, Dict, List, Optional, Sequence


class ParamError(ValueError):
    """小节参数缺失或取值非法"""


class ParamTypeError(ParamError, TypeError):
    """小节参数类型错误"""


class SectionParams:
    """带路径信息的参数读取器

    所有错误都以 ParamError（或其子类 ParamTypeError）抛出，信息中包含完整键路径，
    由主控制器转为配置错误；操作内部的其他 ValueError 不属于配置错误。
    """

    _MISSING = object()

    def __init__(self, section: str, params: Dict[str, Any]):
        self.section = section
        self.params = params

    def _path(self, key: str) -> str:
        return f"{self.section}.params.{key}"

    def _get(self, key: str, default: Any) -> Any:
        if key in self.params:
            return self.params[key]
        if default is self._MISSING:
            raise ParamError(f"'{self.section}.params' 缺少必需字段 '{key}'")
        return default

    def float(self, key: str, default: Any = _MISSING, positive: bool = False) -> Optional[float]:
        value = self._get(key, default)
        if value is None:
            return None
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParamTypeError(f"'{self._path(key)}' 必须是数值类型，实际类型: {type(value)}")
        if positive and value <= 0:
            raise ParamError(f"'{self._path(key)}' 必须为正，实际: {value}")
        return float(value)

    def int(self, key: str, default: Any = _MISSING, minimum: Optional[int] = None) -> Optional[int]:
        value = self._get(key, default)
        if value is None:
            return None
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParamTypeError(f"'{self._path(key)}' 必须是整数类型，实际类型: {type(value)}")
        if minimum is not None and value < minimum:
            raise ParamError(f"'{self._path(key)}' 不能小于 {minimum}，实际: {value}")
        return value

    def bool(self, key: str, default: Any = _MISSING) -> bool:
        value = self._get(key, default)
        if not isinstance(value, bool):
            raise ParamTypeError(f"'{self._path(key)}' 必须是布尔类型，实际类型: {type(value)}")
        return value

    def str(self, key: str, default: Any = _MISSING, choices: Optional[Sequence[str]] = None) -> str:
        value = self._get(key, default)
        if not isinstance(value, str):
            raise ParamTypeError(f"'{self._path(key)}' 必须是字符串类型，实际类型: {type(value)}")
        if choices is not None and value not in choices:
            raise ParamError(f"'{self._path(key)}' 必须是 {list(choices)} 之一，实际: {value}")
        return value

    def vector(self, key: str, default: Any = _MISSING, length: Optional[int] = None) -> Optional[List[float]]:
        """读取数值或数值列表（标量按长度广播）"""
        value = self._get(key, default)
        if value is None:
            return None
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [float(value)] * (length or 1)
        if not isinstance(value, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ParamTypeError(f"'{self._path(key)}' 必须是数值列表，实际: {value!r}")
        if length is not None and len(value) != length:
            raise ParamError(f"'{self._path(key)}' 长度必须为 {length}，实际: {len(value)}")
        return [float(v) for v in value]

    def float_list(self, key: str, default: Any = _MISSING) -> List[float]:
        value = self._get(key, default)
        if not isinstance(value, list) or not value or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ParamTypeError(f"'{self._path(key)}' 必须是非空数值列表，实际: {value!r}")
        return [float(v) for v in value]

    def matrix(self, key: str, default: Any = _MISSING) -> Optional[List[List[float]]]:
        """读取二维数值列表（点集）"""
        value = self._get(key, default)
        if value is None:
            return None
        if not isinstance(value, list) or not value:
            raise ParamTypeError(f"'{self._path(key)}' 必须是非空列表，实际: {value!r}")
        rows = []
        for idx, row in enumerate(value):
            if isinstance(row, (int, float)) and not isinstance(row, bool):
                row = [row]
            if not isinstance(row, list) or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in row):
                raise ParamTypeError(f"'{self._path(key)}[{idx}]' 必须是数值列表，实际: {row!r}")
            rows.append([float(v) for v in row])
        return rows
