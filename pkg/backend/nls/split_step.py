# 分裂步谱方法演化模块
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .observables import ObservableSeries, exceeds_blowup_caps
from .problem import NLSProblem
from ..linprop.grid import BOUNDARY_TOL, Field
from ..utils.exceptions import BoundaryMassException, DomainException, NonFiniteException
from ..utils.logger import lab_logger

BLOWUP_FACTOR = 1e3
GRAD_FACTOR = 1e3
RECORD_EVERY = 10


@dataclass
class EvolutionResult:
    """演化结果：终态、观测序列与爆破标记"""
    field: Field
    series: ObservableSeries
    steps: int
    dt: float
    blowup: bool = False
    blowup_time: Optional[float] = None
    fields: Optional[List[Field]] = None

    @property
    def t_final(self) -> float:
        return self.series.times[-1] if self.series.times else 0.0

    def to_dict(self):
        summary = self.series.summary()
        summary.update({
            "steps": self.steps,
            "dt": self.dt,
            "blowup": self.blowup,
            "blowup_time": self.blowup_time,
        })
        return summary


class SplitStepSolver:
    """Strang 分裂：半步相位 e^{-i(V+μ|u|^p)h/2}，整步动能 e^{-ih|ξ|²/2}，再半步相位

    相位子步中 |u| 不变，因此非线性子步是精确的；每步在离散 L² 下幺正。
    h 可以为负（向后演化）。
    """

    def __init__(self, prob: NLSProblem, h: float):
        if h == 0 or not math.isfinite(h):
            raise DomainException(f"时间步长必须为非零有限数，实际: {h}")
        self.prob = prob
        self.h = float(h)
        self._potential = prob.potential.evaluate(prob.grid.points())
        if not np.all(np.isfinite(self._potential)):
            raise NonFiniteException(f"位势 {prob.potential.name} 在网格上的取值")
        self._kinetic = np.exp(-0.5j * self.h * prob.grid.k2())

    def _phase(self, values: np.ndarray) -> np.ndarray:
        exponent = self._potential
        if self.prob.mu != 0:
            exponent = exponent + self.prob.mu * np.abs(values) ** self.prob.power
        return values * np.exp(-0.5j * self.h * exponent)

    def step(self, values: np.ndarray) -> np.ndarray:
        values = self._phase(values)
        values = np.fft.ifftn(self._kinetic * np.fft.fftn(values))
        return self._phase(values)


def split_step_evolve(prob: NLSProblem, u0: Field, T: float, dt: float,
                      record_every: int = RECORD_EVERY,
                      blowup_factor: float = BLOWUP_FACTOR,
                      grad_factor: float = GRAD_FACTOR,
                      boundary_tol: float = BOUNDARY_TOL,
                      keep_fields: bool = False) -> EvolutionResult:
    """从 u0 演化到时间 T（T < 0 时向后演化）

    共 ⌈|T|/dt⌉ 步，每 record_every 步记录一次观测量（终点总会记录）。
    上确界超过 blowup_factor 倍初值，或动能超过 grad_factor 倍初值时停止并标记爆破。

    Args:
        prob: 问题
        u0: 初值
        T: 终止时间
        dt: 最大步长，必须为正
        record_every: 记录间隔步数
        keep_fields: 是否保存每个记录时刻的场

    Returns:
        EvolutionResult

    Raises:
        BoundaryMassException: 初值或演化中的场触及盒子边界
        NonFiniteException: 场出现非有限值（通常是 dt 过大）
    """
    if not dt > 0:
        raise DomainException(f"时间步长必须为正，实际: {dt}")
    if record_every < 1:
        raise DomainException(f"记录间隔必须至少为 1，实际: {record_every}")
    if u0.grid != prob.grid:
        raise DomainException("初值与问题不在同一网格上")
    u0.check_boundary(boundary_tol, where="NLS 初值")

    steps = int(math.ceil(abs(T) / dt - 1e-9)) if T != 0 else 0
    series = ObservableSeries()
    series.record(prob, 0.0, u0)
    fields = [u0.copy()] if keep_fields else None
    if steps == 0:
        return EvolutionResult(field=u0.copy(), series=series, steps=0, dt=dt, fields=fields)

    h = T / steps
    solver = SplitStepSolver(prob, h)
    sup_cap = blowup_factor * series.sup_norm[0]
    values = u0.values.copy()
    blowup_time = None
    taken = steps
    for k in range(1, steps + 1):
        values = solver.step(values)
        t = k * h
        sup = float(np.max(np.abs(values)))
        if not math.isfinite(sup):
            raise NonFiniteException(f"t={t:.6g} 时的 NLS 解（dt 可能过大）")
        if k % record_every != 0 and k != steps and sup <= sup_cap:
            continue
        u = Field(prob.grid, values)
        series.record(prob, t, u)
        if keep_fields:
            fields.append(u)
        lab_logger.log_evolution_progress(t, series.mass[-1], series.energy[-1], sup)
        if exceeds_blowup_caps(series.sup_norm[-1], series.kinetic[-1], series.sup_norm[0], series.kinetic[0],
                               blowup_factor, grad_factor):
            blowup_time = t
            taken = k
            lab_logger.log_blowup(t, series.sup_norm[-1], series.kinetic[-1])
            break
        fraction = u.boundary_fraction()
        if fraction > boundary_tol:
            lab_logger.log_boundary_mass(fraction, boundary_tol)
            raise BoundaryMassException(fraction, boundary_tol, where=f"NLS 演化 t={t:.6g}")

    return EvolutionResult(field=Field(prob.grid, values), series=series, steps=taken, dt=abs(h),
                           blowup=blowup_time is not None, blowup_time=blowup_time,
                           fields=fields)


def time_reversal_defect(prob: NLSProblem, u0: Field, T: float, dt: float) -> float:
    """‖conj(u(-T)) - u(T)‖₂ / ‖u(T)‖₂，u0 为实值时应为舍入误差量级

    方程在 t → -t 与复共轭下不变（μ 不变）。
    """
    if np.max(np.abs(u0.values.imag)) > 0:
        raise DomainException("时间反演检验要求实值初值")
    forward = split_step_evolve(prob, u0, T, dt, record_every=max(1, int(abs(T) / dt)))
    backward = split_step_evolve(prob, u0, -T, dt, record_every=max(1, int(abs(T) / dt)))
    mirrored = forward.field.with_values(np.conj(backward.field.values))
    return mirrored.relative_l2_error(forward.field)
