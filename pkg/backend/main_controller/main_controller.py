# 主控制盘模块
import time
from typing import Any, Dict, Optional

import numpy as np

from .manifest import RunManifest
from .operations import SUBCOMMAND_HANDLERS, RunContext
from ..utils.exceptions import ConfigException, LabException, NumericalException
from ..utils.logger import lab_logger
from ..utils.worker_pool import worker_pool
from config.config_loader import config_hash, load_config
from config.enums import Subcommand
from config.lab_config import OPERATION_ENUMS, SECTION_KEYS, LabConfig, SectionConfig
from config.section_params import ParamError, SectionParams


class MainController:
    """主控制盘模块

    读取配置文件（没有指定时使用默认配置文件），按子命令取出对应小节，
    交给操作分派表执行，并在输出目录写出结果文件与运行清单。
    """

    def __init__(self):
        self.config = None
        self.config_hash = None
        self.manifest = None

    def load_config(self, config_file_name: str = "default_lab_config") -> LabConfig:
        """加载配置文件

        Args:
            config_file_name: 配置文件名（不需要加.json扩展名）或路径，默认为 "default_lab_config"
                            例如：输入 "harmonic_action" 会查找 "config_file/harmonic_action.json"

        Returns:
            LabConfig 配置对象

        Raises:
            ConfigException: 配置文件不存在、格式不正确或类型不正确
        """
        try:
            self.config = load_config(config_file_name)
        except (FileNotFoundError, ValueError, TypeError) as e:
            raise ConfigException(str(e)) from e
        self.config_hash = config_hash(self.config)
        return self.config

    def set_config(self, config: LabConfig) -> None:
        """直接使用已构造的配置对象（测试与脚本使用）"""
        self.config = config
        self.config_hash = config_hash(config)

    def select_operation(self, subcommand: Subcommand, operation_name: str) -> None:
        """用命令行给出的操作名替换配置小节中的 operation，并重新计算配置哈希

        Raises:
            ConfigException: 子命令没有该操作，或配置中缺少该小节
        """
        operation_enum = OPERATION_ENUMS[subcommand]
        if operation_enum is None:
            raise ConfigException(f"子命令 {subcommand.value} 不接受操作名，实际: {operation_name}")
        try:
            operation = operation_enum(operation_name)
        except ValueError:
            allowed = ", ".join(op.value for op in operation_enum)
            raise ConfigException(f"子命令 {subcommand.value} 无效的操作: {operation_name}（可选: {allowed}）")
        section = self.config.sections.get(subcommand)
        if section is None:
            raise ConfigException(f"配置中缺少 '{SECTION_KEYS[subcommand]}' 小节，无法运行 {subcommand.value}")
        section.operation = operation
        self.config_hash = config_hash(self.config)

    def section(self, subcommand: Subcommand) -> SectionConfig:
        """取出子命令的小节；verify-potential 缺省时使用空参数

        Raises:
            ConfigException: 配置中没有该子命令的小节
        """
        section = self.config.sections.get(subcommand)
        if section is None:
            if OPERATION_ENUMS[subcommand] is None:
                return SectionConfig(operation=None)
            raise ConfigException(f"配置中缺少 '{SECTION_KEYS[subcommand]}' 小节，无法运行 {subcommand.value}")
        return section

    def run(self, subcommand: Subcommand, out_dir: str, workers: Optional[int] = None,
            seed: Optional[int] = None) -> RunManifest:
        """执行一次运行

        Args:
            subcommand: 子命令
            out_dir: 输出目录
            workers: 工作线程数，覆盖配置中的 run.workers
            seed: 随机种子，覆盖配置中的 run.seed

        Returns:
            写出的运行清单

        Raises:
            LabException: 各类配置、前置条件或数值错误（携带退出码）
        """
        if self.config is None:
            self.load_config()
        section = self.section(subcommand)
        seed = self.config.run.seed if seed is None else int(seed)
        try:
            worker_pool.configure(self.config.run.workers if workers is None else workers)
        except ValueError as e:
            raise ConfigException(str(e)) from e

        operation_name = section.operation.value if section.operation is not None else None
        prefix = subcommand.value.replace("-", "_")
        if operation_name is not None:
            prefix += "_" + operation_name.replace("-", "_")
        context = RunContext(config=self.config, params=SectionParams(SECTION_KEYS[subcommand], section.params),
                             out_dir=out_dir, prefix=prefix, seed=seed)
        manifest = RunManifest(config_hash=self.config_hash, subcommand=subcommand.value,
                               operation=operation_name, params=dict(section.params), seed=seed)

        # 开始运行会话日志（已有会话时沿用，例如测试会话）
        own_session = lab_logger.log_file_path is None
        if own_session:
            lab_logger.start_session(is_test=False)
        lab_logger.log_run_start(subcommand.value, operation_name or "-", self.config_hash)
        exit_code = 0
        started = time.perf_counter()
        try:
            summary = self._dispatch(subcommand, section, context)
            lab_logger.log_info(f"运行摘要: {summary}")
            manifest.wall_time = time.perf_counter() - started
            for path in context.outputs:
                manifest.add_output(path)
            manifest.write(out_dir, prefix)
        except LabException as e:
            exit_code = e.exit_code
            lab_logger.log_error(f"{type(e).__name__}: {e}")
            raise
        finally:
            # 结束运行会话日志
            lab_logger.log_run_end(subcommand.value, operation_name or "-", context.outputs, exit_code)
            if own_session:
                lab_logger.end_session()
        self.manifest = manifest
        return manifest

    @staticmethod
    def _dispatch(subcommand: Subcommand, section: SectionConfig, context: RunContext) -> Dict[str, Any]:
        # 只有参数读取器的错误属于配置错误，其余 ValueError/TypeError 来自数值计算
        try:
            return SUBCOMMAND_HANDLERS[subcommand](context, section.operation)
        except ParamError as e:
            raise ConfigException(str(e)) from e
        except np.linalg.LinAlgError as e:
            raise NumericalException(f"线性代数求解失败: {e}") from e
        except (ValueError, TypeError, ArithmeticError) as e:
            raise NumericalException(f"{type(e).__name__}: {e}") from e

    def get_config(self) -> LabConfig:
        """获取当前配置

        Returns:
            当前 LabConfig 配置对象
        """
        return self.config
