# 实验室运行配置
from typing import Dict, Any, Optional, Type
from dataclasses import dataclass, field
from enum import Enum
from .enums import (PotentialName, FieldPreset, Subcommand, ClassicalOperation,
                    PropagateOperation, NLSOperation, ExperimentOperation)


# 每个子命令允许的操作枚举；verify-potential 只有一个隐含操作
OPERATION_ENUMS: Dict[Subcommand, Optional[Type[Enum]]] = {
    Subcommand.VERIFY_POTENTIAL: None,
    Subcommand.CLASSICAL: ClassicalOperation,
    Subcommand.PROPAGATE: PropagateOperation,
    Subcommand.NLS: NLSOperation,
    Subcommand.EXPERIMENT: ExperimentOperation,
}

# JSON 中各子命令小节的键名
SECTION_KEYS: Dict[Subcommand, str] = {
    Subcommand.VERIFY_POTENTIAL: "verify",
    Subcommand.CLASSICAL: "classical",
    Subcommand.PROPAGATE: "propagate",
    Subcommand.NLS: "nls",
    Subcommand.EXPERIMENT: "experiment",
}


@dataclass
class PotentialConfig:
    """位势配置"""
    name: PotentialName  # 内置位势名
    params: Dict[str, Any] = field(default_factory=dict)  # 构造参数（delta、coeffs、eps、k）


@dataclass
class GridConfig:
    """网格配置：[-L, L)^d 上每维 n 个点"""
    d: int
    L: float  # 半宽
    n: int  # 每维点数，2 的幂


@dataclass
class FieldConfig:
    """初值场配置"""
    preset: FieldPreset
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunConfig:
    """运行级配置"""
    seed: int = 0
    workers: int = 0  # 0 表示 CPU 核数


@dataclass
class SectionConfig:
    """某个子命令的小节：操作名与参数"""
    operation: Optional[Enum]
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class LabConfig:
    """实验室配置"""
    potential: PotentialConfig
    grid: Optional[GridConfig] = None
    initial_field: Optional[FieldConfig] = None  # JSON 键 "field"
    run: RunConfig = field(default_factory=RunConfig)
    sections: Dict[Subcommand, SectionConfig] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> 'LabConfig':
        """从字典创建配置对象

        Args:
            config_dict: 配置字典（JSON 解析结果或 to_dict() 的产物）

        Returns:
            配置对象

        Raises:
            ValueError: 如果配置字典格式不正确或缺少必需字段
            TypeError: 如果字段类型不正确
        """
        if not isinstance(config_dict, dict):
            raise TypeError(f"config_dict 必须是字典类型，实际类型: {type(config_dict)}")

        # 位势
        if "potential" not in config_dict:
            raise ValueError("配置字典中缺少 'potential' 字段")
        potential_data = config_dict["potential"]
        if not isinstance(potential_data, dict):
            raise TypeError(f"'potential' 必须是字典类型，实际类型: {type(potential_data)}")
        if "name" not in potential_data:
            raise ValueError("'potential' 缺少必需字段 'name'")
        if not isinstance(potential_data["name"], str):
            raise TypeError(f"'potential.name' 必须是字符串类型，实际类型: {type(potential_data['name'])}")
        try:
            potential_name = PotentialName[potential_data["name"]]
        except KeyError:
            raise ValueError(f"'potential.name' 无效的枚举值: {potential_data['name']}")
        potential_params = potential_data.get("params", {})
        if not isinstance(potential_params, dict):
            raise TypeError(f"'potential.params' 必须是字典类型，实际类型: {type(potential_params)}")
        potential = PotentialConfig(name=potential_name, params=dict(potential_params))

        # 网格（可选，经典力学操作不需要）
        grid = None
        if "grid" in config_dict:
            grid_data = config_dict["grid"]
            if not isinstance(grid_data, dict):
                raise TypeError(f"'grid' 必须是字典类型，实际类型: {type(grid_data)}")
            for key in ("d", "L", "n"):
                if key not in grid_data:
                    raise ValueError(f"'grid' 缺少必需字段 '{key}'")
            if not isinstance(grid_data["d"], int) or isinstance(grid_data["d"], bool):
                raise TypeError(f"'grid.d' 必须是整数类型，实际类型: {type(grid_data['d'])}")
            if grid_data["d"] not in (1, 2, 3):
                raise ValueError(f"'grid.d' 必须是 1、2 或 3，实际: {grid_data['d']}")
            if not isinstance(grid_data["L"], (int, float)) or isinstance(grid_data["L"], bool):
                raise TypeError(f"'grid.L' 必须是数值类型，实际类型: {type(grid_data['L'])}")
            if grid_data["L"] <= 0:
                raise ValueError(f"'grid.L' 必须为正，实际: {grid_data['L']}")
            if not isinstance(grid_data["n"], int) or isinstance(grid_data["n"], bool):
                raise TypeError(f"'grid.n' 必须是整数类型，实际类型: {type(grid_data['n'])}")
            n = grid_data["n"]
            if n < 8 or n & (n - 1) != 0:
                raise ValueError(f"'grid.n' 必须是不小于 8 的 2 的幂，实际: {n}")
            grid = GridConfig(d=grid_data["d"], L=float(grid_data["L"]), n=n)

        # 初值场（可选）
        field_config = None
        if "field" in config_dict:
            field_data = config_dict["field"]
            if not isinstance(field_data, dict):
                raise TypeError(f"'field' 必须是字典类型，实际类型: {type(field_data)}")
            if "preset" not in field_data:
                raise ValueError("'field' 缺少必需字段 'preset'")
            if not isinstance(field_data["preset"], str):
                raise TypeError(f"'field.preset' 必须是字符串类型，实际类型: {type(field_data['preset'])}")
            try:
                preset = FieldPreset[field_data["preset"]]
            except KeyError:
                raise ValueError(f"'field.preset' 无效的枚举值: {field_data['preset']}")
            field_params = field_data.get("params", {})
            if not isinstance(field_params, dict):
                raise TypeError(f"'field.params' 必须是字典类型，实际类型: {type(field_params)}")
            field_config = FieldConfig(preset=preset, params=dict(field_params))

        # 运行参数
        run = RunConfig()
        if "run" in config_dict:
            run_data = config_dict["run"]
            if not isinstance(run_data, dict):
                raise TypeError(f"'run' 必须是字典类型，实际类型: {type(run_data)}")
            seed = run_data.get("seed", 0)
            workers = run_data.get("workers", 0)
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise TypeError(f"'run.seed' 必须是整数类型，实际类型: {type(seed)}")
            if not isinstance(workers, int) or isinstance(workers, bool):
                raise TypeError(f"'run.workers' 必须是整数类型，实际类型: {type(workers)}")
            if workers < 0:
                raise ValueError(f"'run.workers' 必须为非负整数，实际: {workers}")
            run = RunConfig(seed=seed, workers=workers)

        # 子命令小节
        sections: Dict[Subcommand, SectionConfig] = {}
        for subcommand, key in SECTION_KEYS.items():
            if key not in config_dict:
                continue
            section_data = config_dict[key]
            if not isinstance(section_data, dict):
                raise TypeError(f"'{key}' 必须是字典类型，实际类型: {type(section_data)}")
            operation_enum = OPERATION_ENUMS[subcommand]
            operation = None
            if operation_enum is not None:
                if "operation" not in section_data:
                    raise ValueError(f"'{key}' 缺少必需字段 'operation'")
                operation_text = section_data["operation"]
                if not isinstance(operation_text, str):
                    raise TypeError(f"'{key}.operation' 必须是字符串类型，实际类型: {type(operation_text)}")
                try:
                    operation = operation_enum(operation_text)
                except ValueError:
                    allowed = ", ".join(op.value for op in operation_enum)
                    raise ValueError(f"'{key}.operation' 无效的操作: {operation_text}（可选: {allowed}）")
            params = section_data.get("params", {})
            if not isinstance(params, dict):
                raise TypeError(f"'{key}.params' 必须是字典类型，实际类型: {type(params)}")
            sections[subcommand] = SectionConfig(operation=operation, params=dict(params))

        return cls(potential=potential, grid=grid, initial_field=field_config, run=run, sections=sections)

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典（可被 from_dict 读回）"""
        result: Dict[str, Any] = {
            "potential": {"name": self.potential.name.name, "params": dict(self.potential.params)},
            "run": {"seed": self.run.seed, "workers": self.run.workers},
        }
        if self.grid is not None:
            result["grid"] = {"d": self.grid.d, "L": self.grid.L, "n": self.grid.n}
        if self.initial_field is not None:
            result["field"] = {"preset": self.initial_field.preset.name, "params": dict(self.initial_field.params)}
        for subcommand, section in self.sections.items():
            section_dict: Dict[str, Any] = {"params": dict(section.params)}
            if section.operation is not None:
                section_dict["operation"] = section.operation.value
            result[SECTION_KEYS[subcommand]] = section_dict
        return result
