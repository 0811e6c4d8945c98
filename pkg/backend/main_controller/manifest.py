# 运行清单模块
import hashlib
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .. import __version__
from ..utils.output_writer import write_json

TOOL_NAME = "subquadratic-lab"
TOOL_VERSION = __version__
MANIFEST_SUFFIX = "_manifest.json"


def manifest_name(prefix: str) -> str:
    """运行清单文件名，与本次运行的结果文件同一前缀；同一输出目录中的多次运行互不覆盖"""
    return f"{prefix}{MANIFEST_SUFFIX}"


def file_sha256(path: str) -> str:
    """文件内容的 SHA-256"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """一次运行的清单

    同一配置哈希的两次运行，除 wall_time 外所有字段以及输出文件的哈希都相同。
    """
    config_hash: str
    subcommand: str
    operation: Optional[str]
    params: Dict[str, Any]
    seed: int
    tool_version: str = TOOL_VERSION
    wall_time: float = 0.0
    outputs: List[Dict[str, str]] = field(default_factory=list)

    def add_output(self, path: str) -> None:
        """登记一个输出文件（记录相对输出目录的文件名与内容哈希）"""
        self.outputs.append({"file": os.path.basename(path), "sha256": file_sha256(path)})

    def output_hashes(self) -> Dict[str, str]:
        return {entry["file"]: entry["sha256"] for entry in self.outputs}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": TOOL_NAME,
            "tool_version": self.tool_version,
            "config_hash": self.config_hash,
            "subcommand": self.subcommand,
            "operation": self.operation,
            "params": self.params,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "outputs": self.outputs,
        }

    def write(self, out_dir: str, prefix: str) -> str:
        return write_json(os.path.join(out_dir, manifest_name(prefix)), self)
