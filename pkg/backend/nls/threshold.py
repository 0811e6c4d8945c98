# 基态阈值扫描模块
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .ground_state import KINETIC_W_EXACT, ENERGY_W_EXACT
from .observables import energy
from .problem import NLSProblem
from .split_step import BLOWUP_FACTOR, GRAD_FACTOR, split_step_evolve
from ..linprop.field_factory import bump_cutoff, w_profile
from ..linprop.grid import BOUNDARY_TOL, Field
from ..utils.exceptions import BoundaryMassException, DomainException
from ..utils.logger import lab_logger
from ..utils.worker_pool import worker_pool

OUTCOME_BLOWUP = "blowup"
OUTCOME_BOUNDED = "bounded"
OUTCOME_ESCAPED = "escaped"


@dataclass
class ThresholdCell:
    """一个初值的扫描结果"""
    kinetic_ratio: float
    amplitude: float
    energy: float
    energy_ratio: float
    outcome: str
    blowup_time: Optional[float]
    t_final: float

    def row(self):
        return [self.kinetic_ratio, self.amplitude, self.energy, self.energy_ratio,
                self.outcome, self.blowup_time, self.t_final]


@dataclass
class ThresholdSweep:
    cells: List[ThresholdCell] = field(default_factory=list)
    kinetic_W: float = KINETIC_W_EXACT
    energy_W: float = ENERGY_W_EXACT

    COLUMNS = ["kinetic_ratio", "amplitude", "energy", "energy_ratio", "outcome",
               "blowup_time", "t_final"]

    def rows(self):
        return [cell.row() for cell in self.cells]

    def to_dict(self):
        return {
            "kinetic_W": self.kinetic_W,
            "energy_W": self.energy_W,
            "outcomes": {f"{c.kinetic_ratio:.6g}": c.outcome for c in self.cells},
        }


def cutoff_w(prob: NLSProblem, cutoff: Optional[float] = None) -> Field:
    """截断的 W 剖面 χ(|x|/R) W(x)"""
    grid = prob.grid
    cutoff = grid.L / 2.0 if cutoff is None else float(cutoff)
    r2 = grid.radius2()
    return Field(grid, w_profile(r2, grid.d) * bump_cutoff(np.sqrt(r2) / cutoff, 0.5, 1.0))


def threshold_sweep(prob: NLSProblem, kinetic_ratios: Sequence[float], T: float, dt: float,
                    cutoff: Optional[float] = None, record_every: int = 10,
                    blowup_factor: float = BLOWUP_FACTOR, grad_factor: float = GRAD_FACTOR,
                    boundary_tol: float = BOUNDARY_TOL) -> ThresholdSweep:
    """在 ‖∇u₀‖₂/‖∇W‖₂ 的两侧扫描聚焦能量临界问题的演化结局

    初值取 a·χW，a 使动能比等于给定值；每个初值独立演化，交给工作池并行。
    两个不等式方向都不作为真值编码，只记录每个初值的结局：
    blowup（检测到爆破）、bounded（到 T 仍有界）、escaped（质量触及边界）。

    Raises:
        DomainException: 不是 d = 3 的聚焦能量临界问题
    """
    if prob.grid.d != 3 or not prob.energy_critical or prob.mu != -1:
        raise DomainException("阈值扫描要求 d = 3、μ = -1 的能量临界问题")
    profile = cutoff_w(prob, cutoff)
    base_kinetic = profile.kinetic()
    sweep = ThresholdSweep()

    def run_cell(ratio: float) -> ThresholdCell:
        amplitude = float(ratio) * np.sqrt(KINETIC_W_EXACT / base_kinetic)
        u0 = profile.with_values(amplitude * profile.values)
        e0 = energy(prob, u0)
        try:
            result = split_step_evolve(prob, u0, T, dt, record_every=record_every,
                                       blowup_factor=blowup_factor, grad_factor=grad_factor,
                                       boundary_tol=boundary_tol)
            outcome = OUTCOME_BLOWUP if result.blowup else OUTCOME_BOUNDED
            blowup_time, t_final = result.blowup_time, result.t_final
        except BoundaryMassException as e:
            lab_logger.log_warning(f"动能比 {ratio} 的初值触及边界: {e}")
            outcome, blowup_time, t_final = OUTCOME_ESCAPED, None, float("nan")
        cell = ThresholdCell(kinetic_ratio=float(ratio), amplitude=amplitude, energy=e0,
                             energy_ratio=e0 / ENERGY_W_EXACT, outcome=outcome,
                             blowup_time=blowup_time, t_final=t_final)
        lab_logger.log_experiment_cell("threshold-sweep", f"动能比 {ratio}",
                                       {"energy_ratio": cell.energy_ratio, "outcome": outcome})
        return cell

    sweep.cells = worker_pool.map(run_cell, list(kinetic_ratios))
    return sweep
