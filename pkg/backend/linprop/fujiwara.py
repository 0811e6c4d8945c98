# Fujiwara 型振荡积分传播子模块
from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .grid import BOUNDARY_TOL, Field, GridSpec
from ..classical.bvp import check_focal, shoot
from ..potential.potential import Potential
from ..utils.exceptions import ResolutionException
from ..utils.logger import lab_logger
from ..utils.worker_pool import worker_pool
from config.enums import ResolutionPolicy

KERNEL_DT = 1e-2
KERNEL_STEPS = 16
# 每个行块中 (x, y) 对的数目上限
PAIR_BLOCK = 1 << 18
NEGLIGIBLE = 1e-8
_CACHE_SIZE = 2


def kernel_dt(t: float) -> float:
    """核表打靶所用的步长：至少 KERNEL_STEPS 步"""
    return min(KERNEL_DT, abs(t) / KERNEL_STEPS)


@dataclass
class KernelTable:
    """时间 t 的作用量表 S(t, x_i, y_j) 以及初始动量大小 |η*(x_i, y_j)|

    行对应终点 x_i，列对应起点 y_j，均按网格的行优先顺序展平。
    """
    grid: GridSpec
    t: float
    action: np.ndarray
    eta_norm: np.ndarray
    iterations: int
    residual: float

    @property
    def prefactor(self) -> complex:
        """(2πit)^{-d/2}，取主支"""
        d = self.grid.d
        return complex((2.0 * math.pi * abs(self.t)) ** (-d / 2.0)
                       * np.exp(-0.25j * math.pi * d * math.copysign(1.0, self.t)))

    def aliased(self) -> np.ndarray:
        """核在 y 方向的局部频率 |η| 超过网格 Nyquist 频率 π/h 的位置"""
        return self.eta_norm * self.grid.h > math.pi

    def weights(self, mask: Optional[np.ndarray] = None) -> np.ndarray:
        weights = self.prefactor * self.grid.cell_volume * np.exp(1j * self.action)
        if mask is not None:
            weights = np.where(mask, 0.0, weights)
        return weights


class _KernelCache:
    """按 (位势, t, 网格) 缓存核表"""

    def __init__(self):
        self._entries: "OrderedDict[Tuple, KernelTable]" = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            table = self._entries.get(key)
            if table is not None:
                self._entries.move_to_end(key)
            return table

    def put(self, key, table: KernelTable):
        with self._lock:
            self._entries[key] = table
            while len(self._entries) > _CACHE_SIZE:
                self._entries.popitem(last=False)

    def clear(self):
        with self._lock:
            self._entries.clear()


kernel_cache = _KernelCache()


def build_kernel_table(p: Potential, grid: GridSpec, t: float, dt: Optional[float] = None,
                       focal_bound: Optional[float] = None) -> KernelTable:
    """对网格上全部 (x_i, y_j) 求解两点边值问题，得到作用量表

    行块之间相互独立，交给工作池并行；合并顺序固定，因此结果与线程数无关。

    Raises:
        FocalTimeException: |t| 超出焦点界
        ConvergenceException: 某个行块打靶不收敛
    """
    p.check_dim(grid.d)
    bound = check_focal(p, t, grid.d, focal_bound)
    key = (p.cache_key(), float(t), grid.content_hash())
    cached = kernel_cache.get(key)
    lab_logger.log_kernel_cache(cached is not None, f"{p.name} t={t:.6g} grid={key[2]}")
    if cached is not None:
        return cached

    step = kernel_dt(t) if dt is None else float(dt)
    points = grid.points().reshape(-1, grid.d)
    total = points.shape[0]
    rows = max(1, PAIR_BLOCK // total)
    blocks = [(start, min(start + rows, total)) for start in range(0, total, rows)]

    def solve_block(block):
        start, stop = block
        return shoot(p, points[None, :, :], points[start:stop, None, :], t,
                     dt=step, focal_bound=bound, polish=False)

    results = worker_pool.map(solve_block, blocks)
    table = KernelTable(
        grid=grid,
        t=float(t),
        action=np.concatenate([r.action for r in results], axis=0),
        eta_norm=np.concatenate([np.linalg.norm(r.eta, axis=-1) for r in results], axis=0),
        iterations=max(r.iterations for r in results),
        residual=max(r.residual for r in results),
    )
    kernel_cache.put(key, table)
    return table


@dataclass
class FujiwaraResult:
    """传播结果与诊断信息"""
    field: Field
    masked_fraction: float
    iterations: int
    residual: float


def fujiwara_propagate(p: Potential, f: Field, t: float,
                       policy: ResolutionPolicy = ResolutionPolicy.STRICT,
                       dt: Optional[float] = None, focal_bound: Optional[float] = None,
                       boundary_tol: float = BOUNDARY_TOL) -> FujiwaraResult:
    """用 (2πit)^{-d/2} e^{iS(t,x,y)} 作核的振荡积分近似 e^{-itH} f

    对所有 0 < |t| ≤ δ₀ 有定义；与精确传播子的差别是振幅 (det ∂x/∂η / t^d)^{-1/2}
    被取为 1，因此误差在 t → 0 时是 O(t²)。

    Args:
        p: 位势
        f: 初值，要求远离盒子边界
        t: 时间
        policy: 核频率超过 Nyquist 时的处理：STRICT 报错，MASK 将这些 (x, y) 对置零
        dt: 打靶步长；缺省为 kernel_dt(t)
        focal_bound: δ₀；缺省用解析下界

    Raises:
        BoundaryMassException: 初值在边界层上有不可忽略的质量
        FocalTimeException: |t| 超出焦点界
        ResolutionException: STRICT 策略下核欠分辨
    """
    f.check_boundary(boundary_tol, where="Fujiwara 传播初值")
    table = build_kernel_table(p, f.grid, t, dt=dt, focal_bound=focal_bound)
    values = f.values.reshape(-1)
    support = np.abs(values) > NEGLIGIBLE * np.max(np.abs(values)) if values.size else values
    aliased = table.aliased() & support[None, :]
    masked_fraction = float(np.count_nonzero(aliased) / aliased.size) if aliased.size else 0.0
    if masked_fraction > 0:
        if policy == ResolutionPolicy.STRICT:
            worst = float(np.max(table.eta_norm[:, support])) if np.any(support) else 0.0
            raise ResolutionException(
                f"核频率 |η|={worst:.4g} 超过 π/h={math.pi / f.grid.h:.4g}，"
                f"{masked_fraction:.2%} 的 (x, y) 对欠分辨；请加密网格或改用 MASK 策略")
        lab_logger.log_warning(f"Fujiwara 核欠分辨，置零的 (x, y) 对占比 {masked_fraction:.3e}")
    out = table.weights(aliased if masked_fraction > 0 else None) @ values
    return FujiwaraResult(field=f.with_values(out.reshape(f.grid.shape)),
                          masked_fraction=masked_fraction,
                          iterations=table.iterations, residual=table.residual)


def fujiwara_apply(p: Potential, f: Field, t: float,
                   policy: ResolutionPolicy = ResolutionPolicy.STRICT, **kwargs) -> Field:
    return fujiwara_propagate(p, f, t, policy=policy, **kwargs).field
