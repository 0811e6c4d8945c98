# 并行工作池模块
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """全局工作池（单例）

    独立的计算单元（核表行块、实验单元、采样块）在这里并行执行，
    结果按输入顺序合并，保证与工作线程数无关的确定性输出。
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
        self._workers = os.cpu_count() or 1

    def configure(self, workers: Optional[int]) -> None:
        """设置工作线程数

        Args:
            workers: 线程数；None 或 0 表示使用 CPU 核数
        """
        if workers is None or workers == 0:
            self._workers = os.cpu_count() or 1
        elif workers < 0:
            raise ValueError(f"workers 必须为非负整数，实际: {workers}")
        else:
            self._workers = int(workers)

    @property
    def workers(self) -> int:
        return self._workers

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """按序并行映射

        单线程或只有一个单元时直接顺序执行。
        """
        items = list(items)
        if self._workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=min(self._workers, len(items))) as executor:
            return list(executor.map(fn, items))


# 全局工作池实例
worker_pool = WorkerPool()
