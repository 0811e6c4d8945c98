# 日志系统模块
import logging
import os
from datetime import datetime
from typing import Optional
import threading


class LabLogger:
    """实验室日志系统

    负责管理运行日志的创建、记录和保存。日志只用于诊断，不属于数值输出。
    """

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        """单例模式"""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if hasattr(self, '_initialized'):
            return

        self._initialized = True
        self.logger = None
        self.log_file_path = None
        self.is_test_mode = False
        self._setup_logger()

    def _setup_logger(self):
        """设置日志器"""
        self.logger = logging.getLogger('lab_logger')
        self.logger.setLevel(logging.INFO)

        # 清除已有的处理器
        for handler in self.logger.handlers[:]:
            self.logger.removeHandler(handler)

    def start_session(self, is_test: bool = False) -> str:
        """开始新的运行会话

        Args:
            is_test: 是否为测试模式

        Returns:
            日志文件路径
        """
        if self.log_file_path is not None:
            # 已有会话时先收尾，避免重复挂载处理器
            self.end_session()
        self.is_test_mode = is_test

        if is_test:
            log_dir = os.path.join(os.getcwd(), 'logs', 'test')
        else:
            log_dir = os.path.join(os.getcwd(), 'logs', 'run')

        os.makedirs(log_dir, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        if is_test:
            filename = f"test_session_{timestamp}.log"
        else:
            filename = f"run_session_{timestamp}.log"

        self.log_file_path = os.path.join(log_dir, filename)

        file_handler = logging.FileHandler(self.log_file_path, encoding='utf-8')
        file_handler.setLevel(logging.INFO)

        formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(formatter)
        self.logger.addHandler(file_handler)

        self.log_session_start()

        return self.log_file_path

    def end_session(self):
        """结束运行会话"""
        if self.logger and self.log_file_path:
            self.logger.info("=" * 50)
            self.logger.info("运行会话结束")
            self.logger.info("=" * 50)

            for handler in self.logger.handlers[:]:
                if isinstance(handler, logging.FileHandler):
                    self.logger.removeHandler(handler)
                    handler.close()

            self.log_file_path = None

    def log_session_start(self):
        """记录会话开始"""
        if self.logger:
            self.logger.info("=" * 50)
            self.logger.info("运行会话开始")
            self.logger.info(f"时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
            self.logger.info(f"模式: {'测试模式' if self.is_test_mode else '正常模式'}")
            self.logger.info("=" * 50)

    def log_info(self, message: str):
        """记录信息日志"""
        if self.logger:
            self.logger.info(message)

    def log_warning(self, message: str):
        """记录警告日志"""
        if self.logger:
            self.logger.warning(message)

    def log_error(self, message: str):
        """记录错误日志"""
        if self.logger:
            self.logger.error(message)

    def log_debug(self, message: str):
        """记录调试日志"""
        if self.logger:
            self.logger.debug(message)

    def log_run_start(self, subcommand: str, operation: str, config_hash: str):
        """记录一次命令行运行的开始"""
        if self.logger:
            self.logger.info(f"运行 {subcommand}/{operation}，配置哈希 {config_hash[:12]}")

    def log_run_end(self, subcommand: str, operation: str, outputs: list, exit_code: int = 0):
        """记录一次命令行运行的结束"""
        if self.logger:
            self.logger.info(
                f"结束 {subcommand}/{operation}，退出码 {exit_code}，输出文件 {len(outputs)} 个"
            )

    def log_hypothesis_report(self, potential_name: str, report: dict):
        """记录位势假设检验结果"""
        if self.logger:
            flags = ", ".join(f"{k}={v}" for k, v in report.items() if k.startswith("pass_"))
            self.logger.info(f"位势 {potential_name} 假设检验: {flags}")

    def log_bvp_convergence(self, count: int, iterations: int, residual: float):
        """记录打靶法收敛情况"""
        if self.logger:
            self.logger.info(f"两点边值问题 {count} 个: {iterations} 次迭代，最大残差 {residual:.3e}")

    def log_kernel_cache(self, hit: bool, key: str):
        """记录核表缓存命中"""
        if self.logger:
            self.logger.info(f"核表缓存{'命中' if hit else '未命中'}: {key}")

    def log_evolution_progress(self, t: float, mass: float, energy: float, sup: float):
        """记录演化中的观测量"""
        if self.logger:
            self.logger.debug(f"t={t:.6g} 质量={mass:.12g} 能量={energy:.12g} 上确界={sup:.6g}")

    def log_blowup(self, t: float, sup: float, kinetic: float):
        """记录爆破检测"""
        if self.logger:
            self.logger.warning(f"在 t={t:.6g} 检测到爆破: 上确界={sup:.6g}, 动能={kinetic:.6g}")

    def log_boundary_mass(self, fraction: float, tolerance: float):
        """记录边界质量告警"""
        if self.logger:
            self.logger.warning(f"边界质量占比 {fraction:.3e}（容差 {tolerance:.1e}）")

    def log_experiment_cell(self, experiment: str, label: str, values: Optional[dict] = None):
        """记录实验中的一个单元"""
        if self.logger:
            detail = ""
            if values:
                detail = " " + ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                                         for k, v in values.items())
            self.logger.info(f"[{experiment}] {label}{detail}")


# 全局日志器实例
lab_logger = LabLogger()
