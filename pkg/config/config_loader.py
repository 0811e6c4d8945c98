# 配置文件加载
import hashlib
import json
import os
from typing import Dict, Any, Tuple
from .lab_config import LabConfig

ENV_PREFIX = "SQLAB_"


def resolve_config_path(config_file_name: str) -> str:
    """解析配置文件路径

    接受 config_file/ 下的文件名（可省略 .json）或一个已存在的路径。
    """
    if os.path.isfile(config_file_name):
        return os.path.abspath(config_file_name)

    # 计算项目根目录：从 config/ 向上一级到项目根目录
    current_file_dir = os.path.dirname(os.path.abspath(__file__))
    project_root = os.path.dirname(current_file_dir)
    config_file_dir = os.path.join(project_root, 'config_file')

    if config_file_name.endswith('.json'):
        file_name = config_file_name
    else:
        file_name = config_file_name + '.json'
    return os.path.join(config_file_dir, file_name)


def load_config_dict(config_file_name: str = "default_lab_config") -> Dict[str, Any]:
    """读取原始配置字典

    Raises:
        FileNotFoundError: 如果指定的配置文件不存在
        ValueError: 如果文件不是合法 JSON
    """
    config_path = resolve_config_path(config_file_name)
    if not os.path.exists(config_path):
        raise FileNotFoundError(
            f"配置文件不存在: {config_path}\n"
            f"请确保 config_file/{os.path.basename(config_path)} 文件存在"
        )
    with open(config_path, 'r', encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"配置文件不是合法 JSON: {config_path}: {e}")


def load_config(config_file_name: str = "default_lab_config") -> LabConfig:
    """加载配置文件

    Args:
        config_file_name: 配置文件名（不需要加.json扩展名）或文件路径，默认为 "default_lab_config"
                        例如：输入 "harmonic_action" 会查找 "config_file/harmonic_action.json"

    Returns:
        LabConfig 配置对象

    Raises:
        FileNotFoundError: 如果指定的配置文件不存在
        ValueError: 如果配置文件格式不正确
        TypeError: 如果配置文件类型不正确
    """
    return LabConfig.from_dict(load_config_dict(config_file_name))


def config_hash(config: LabConfig) -> str:
    """配置的 SHA-256 哈希（基于键排序的规范 JSON）"""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def env_overrides(environ: Dict[str, str] = None) -> Dict[str, str]:
    """收集 SQLAB_ 前缀的环境变量覆盖（键为小写去前缀）"""
    environ = os.environ if environ is None else environ
    return {key[len(ENV_PREFIX):].lower(): value
            for key, value in environ.items() if key.startswith(ENV_PREFIX)}


def split_seed_workers(overrides: Dict[str, str]) -> Tuple[int, int]:
    """解析环境变量中的 seed 与 workers，缺省返回 None"""
    seed = overrides.get("seed")
    workers = overrides.get("workers")
    try:
        seed_value = int(seed) if seed is not None else None
        workers_value = int(workers) if workers is not None else None
    except ValueError:
        raise ValueError(f"环境变量 {ENV_PREFIX}SEED/{ENV_PREFIX}WORKERS 必须是整数")
    return seed_value, workers_value
