# 缩放传播子强收敛实验模块
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .frames import FrameLimit, FrameParams, frame_limit, frame_q_norm, inverse_rescale_G, rescale_G
from ..linprop.grid import BOUNDARY_TOL, Field, GridSpec
from ..linprop.spectral import spectral_propagate
from ..potential.potential import Potential, ZeroPotential
from ..utils.exceptions import DomainException
from ..utils.logger import lab_logger
from ..utils.worker_pool import worker_pool
from config.enums import EvaluationMethod

EXPERIMENT_NAME = "strong-convergence"


@dataclass
class ConvergenceCell:
    """一个框架上的误差"""
    N: float
    x_n: float
    t_n: float
    error: float
    unmodulated_error: float
    floor: float
    q_norm: float

    def row(self):
        return [self.N, self.x_n, self.t_n, self.error, self.unmodulated_error, self.floor, self.q_norm]


@dataclass
class StrongConvergenceReport:
    limit: FrameLimit
    method: EvaluationMethod
    reference_norm: float
    cells: List[ConvergenceCell] = field(default_factory=list)

    COLUMNS = ["N", "x_n", "t_n", "error", "unmodulated_error", "floor", "q_norm"]

    @property
    def errors(self) -> List[float]:
        return [cell.error for cell in self.cells]

    def is_decreasing(self, start: int = 0) -> bool:
        errors = self.errors[start:]
        return all(b <= a for a, b in zip(errors, errors[1:]))

    def rows(self):
        return [cell.row() for cell in self.cells]

    def to_dict(self):
        return {
            "experiment": EXPERIMENT_NAME,
            "method": self.method.name,
            "limit": self.limit.to_dict(),
            "reference_sigma_norm": self.reference_norm,
            "errors": self.errors,
            "final_error": self.errors[-1] if self.cells else None,
            "decreasing": self.is_decreasing(),
            "q_norm_max": max((c.q_norm for c in self.cells), default=0.0),
        }


def strong_convergence_experiment(p: Potential, phi: Field, frames: Sequence[FrameParams],
                                  t_inf: Optional[float] = None,
                                  method: EvaluationMethod = EvaluationMethod.RESCALED,
                                  physical_grid: Optional[GridSpec] = None,
                                  order: int = 4) -> StrongConvergenceReport:
    """对每个框架计算 e_n = ‖G_n^{-1} e^{-it_n H} G_n φ - e^{-it_∞ r_∞²} e^{it_∞Δ/2} φ‖_Σ

    RESCALED 方式利用 G_n^{-1} e^{-it_n H} G_n = e^{-iN² t_n H_N}（H_N 为缩放坐标中的哈密顿量），
    直接在 φ 的网格上计算；PHYSICAL 方式把 G_nφ 重采样到 physical_grid 上传播后再采样回来，
    只适用于 N 不大的情形。自由流用同一差分格式的零位势谱传播计算，使两边离散误差一致。
    同时给出不带调制因子时的误差及其下界 2|sin(t_∞r_∞²/2)|‖e^{it_∞Δ/2}φ‖_Σ。

    Raises:
        DomainException: 不是一维，或 PHYSICAL 方式缺少物理网格
        ResolutionException: 物理网格放不下或分辨不了集中态
    """
    if phi.grid.d != 1:
        raise DomainException(f"强收敛实验只在一维（有谱方法真值）上进行，实际 d={phi.grid.d}")
    if method == EvaluationMethod.PHYSICAL and physical_grid is None:
        raise DomainException("PHYSICAL 方式需要给出物理网格")
    phi.check_boundary(BOUNDARY_TOL, where="强收敛实验初值")
    limit = frame_limit(p, frames)
    t_inf = limit.t_inf if t_inf is None else float(t_inf)
    theta = t_inf * limit.r_inf ** 2

    free = spectral_propagate(ZeroPotential(), phi, t_inf, order=order)
    expected = free.with_values(np.exp(-1j * theta) * free.values)
    reference_norm = free.sigma_norm()
    floor = 2.0 * abs(math.sin(theta / 2.0)) * reference_norm

    def run_cell(frame: FrameParams) -> ConvergenceCell:
        if method == EvaluationMethod.RESCALED:
            u = spectral_propagate(frame.rescaled_potential(p), phi, frame.N ** 2 * frame.t_n, order=order)
        else:
            g = rescale_G(frame, phi, physical_grid)
            g_t = spectral_propagate(p, g, frame.t_n, order=order)
            u = inverse_rescale_G(frame, g_t, phi.grid)
        cell = ConvergenceCell(
            N=frame.N,
            x_n=frame.x_n[0],
            t_n=frame.t_n,
            error=(u - expected).sigma_norm(),
            unmodulated_error=(u - free).sigma_norm(),
            floor=floor,
            q_norm=frame_q_norm(p, frame, phi),
        )
        lab_logger.log_experiment_cell(EXPERIMENT_NAME, f"N={frame.N:g}",
                                       {"error": cell.error, "unmodulated": cell.unmodulated_error})
        return cell

    report = StrongConvergenceReport(limit=limit, method=method, reference_norm=reference_norm)
    report.cells = worker_pool.map(run_cell, list(frames))
    return report
