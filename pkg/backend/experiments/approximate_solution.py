# 近似解构造与残差实验模块
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import trapezoid

from .frames import FrameParams, cutoff_S, littlewood_paley
from ..linprop.grid import Field
from ..nls.problem import NLSProblem, default_power
from ..nls.split_step import RECORD_EVERY, split_step_evolve
from ..potential.potential import Potential, ZeroPotential
from ..utils.exceptions import DomainException
from ..utils.logger import lab_logger
from config.enums import FrameType

EXPERIMENT_NAME = "approx-solution"
HORIZON_FACTOR = 2.0


@dataclass
class ResidualReport:
    """近似解 ṽ 的方程残差

    残差范数为 ∫‖(i∂_t - H)ṽ - F(ṽ)‖_{L²} dt（L¹_t L²_x，作为对偶范数 N(I) 的替代），
    已换算回物理坐标。stitch_defect 是拼接后第一个记录时刻 ±T + δ 处，
    把窗口内的构造继续下去与线性延拓之间的 L² 差（缩放坐标，取两侧最大值）；
    ṽ 在 ±T 处本身连续，这个量反映两段在拼接点之后多快分开。
    """
    frame: FrameParams
    window: float
    horizon: float
    cutoff_radius: float
    frequency_cutoff: float
    residual: float
    window_residual: float
    tail_residual: float
    initial_mismatch: float
    stitch_defect: float
    times: List[float] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)

    COLUMNS = ["s", "residual_l2"]

    def rows(self):
        return list(zip(self.times, self.norms))

    def to_dict(self):
        return {
            "experiment": EXPERIMENT_NAME,
            "frame": self.frame.to_dict(),
            "window": self.window,
            "horizon": self.horizon,
            "cutoff_radius": self.cutoff_radius,
            "frequency_cutoff": self.frequency_cutoff,
            "residual": self.residual,
            "window_residual": self.window_residual,
            "tail_residual": self.tail_residual,
            "initial_mismatch": self.initial_mismatch,
            "stitch_defect": self.stitch_defect,
            "norm": "L1_t L2_x",
        }


def _integrate(times: List[float], norms: List[float]) -> float:
    if len(times) < 2:
        return 0.0
    order = np.argsort(times)
    return float(trapezoid(np.asarray(norms)[order], np.asarray(times)[order]))


def approximate_solution_residual(p: Potential, frame: FrameParams, phi: Field, T: float,
                                  mu: int = 1, power: Optional[float] = None, dt: float = 1e-3,
                                  record_every: int = RECORD_EVERY,
                                  horizon_factor: float = HORIZON_FACTOR,
                                  cutoffs: bool = True) -> ResidualReport:
    """在缩放坐标中构造近似解并度量残差

    窗口 |s| ≤ T 内 ṽ(s) = e^{-isV_N(0)} χ(y/R) P_{≤Ñ′} v(s)，R = N/N′，Ñ′ = (N/N′)^{1/2}，
    v 是无位势问题从 φ 出发的解；窗口外从 ṽ(±T) 出发按线性流 e^{-i(s∓T)H_N} 延拓到 ±horizon_factor·T，
    因此拼接处连续。窗口内残差按解析式逐时刻计算：

        e^{-isV_N(0)}[χP(-Δv/2 + F(v)) + Δ(χPv)/2 - F(χPv)] - (V_N - V_N(0))ṽ

    窗口外残差为 -F(ṽ)。物理坐标中的 L¹_tL²_x 范数是缩放坐标中的 N^{α-d/2} 倍，α = 2/p。

    Raises:
        DomainException: 框架的 t_n ≠ 0，或窗口参数不合法
    """
    if frame.t_n != 0:
        raise DomainException(f"近似解实验要求框架时间 t_n = 0，实际: {frame.t_n}")
    if not T > 0:
        raise DomainException(f"时间窗必须为正，实际: {T}")
    if horizon_factor < 1:
        raise DomainException(f"延拓时间 {horizon_factor}·T 不能短于时间窗 T")
    grid = phi.grid
    d = grid.d
    power = default_power(d) if power is None else float(power)
    exponent = 2.0 / power
    horizon = horizon_factor * T
    v_n = frame.rescaled_potential(p)
    v_values = v_n.evaluate(grid.points())
    v_zero = float(v_n.evaluate(np.zeros(d)))
    use_cutoffs = cutoffs and frame.frame_type != FrameType.TYPE_1
    radius = frame.cutoff_radius
    frequency = math.sqrt(radius)

    def nonlinearity(values: np.ndarray) -> np.ndarray:
        if mu == 0:
            return np.zeros_like(values)
        return mu * np.abs(values) ** power * values

    def localize(values: np.ndarray) -> np.ndarray:
        if not use_cutoffs:
            return values
        return cutoff_S(frame, littlewood_paley(Field(grid, values), frequency)).values

    def window_residual(s: float, v: Field):
        lap_v = v.laplacian()
        local_v = localize(v.values)
        local_rhs = localize(-0.5 * lap_v + nonlinearity(v.values))
        phase = np.exp(-1j * s * v_zero)
        approx = phase * local_v
        residual = (phase * (local_rhs + 0.5 * Field(grid, local_v).laplacian() - nonlinearity(local_v))
                    - (v_values - v_zero) * approx)
        return approx, float(np.sqrt(np.sum(np.abs(residual) ** 2) * grid.cell_volume))

    free_prob = NLSProblem(ZeroPotential(), mu, grid, power)
    linear_prob = NLSProblem(v_n, 0, grid, power)
    times: List[float] = []
    norms: List[float] = []
    tail_times: List[float] = []
    tail_norms: List[float] = []
    initial_mismatch = 0.0
    stitch_defect = 0.0

    for sign in (1.0, -1.0):
        inner = split_step_evolve(free_prob, phi, sign * T, dt, record_every=record_every,
                                  keep_fields=True)
        approx = None
        for s, v in zip(inner.series.times, inner.fields):
            if sign < 0 and s == 0.0:
                continue
            approx, norm = window_residual(s, v)
            if s == 0.0:
                initial_mismatch = Field(grid, approx - phi.values).norm_l2()
            times.append(s)
            norms.append(norm)
        stitched = Field(grid, approx)
        outer = split_step_evolve(linear_prob, stitched, sign * (horizon - T), dt,
                                  record_every=record_every, keep_fields=True)
        if len(outer.fields) > 1:
            # 拼接后第一个记录时刻：窗口内构造的继续与线性延拓之差
            step = outer.series.times[1]
            beyond = split_step_evolve(free_prob, inner.field, step, dt, record_every=record_every).field
            continued, _ = window_residual(sign * T + step, beyond)
            stitch_defect = max(stitch_defect, Field(grid, continued - outer.fields[1].values).norm_l2())
        for s, u in zip(outer.series.times, outer.fields):
            tail_times.append(sign * T + s)
            tail_norms.append(Field(grid, nonlinearity(u.values)).norm_l2())

    factor = frame.N ** (exponent - d / 2.0)
    # 窗口外按 s > T 与 s < -T 两段分别积分
    positive = [(t, n) for t, n in zip(tail_times, tail_norms) if t >= T]
    negative = [(t, n) for t, n in zip(tail_times, tail_norms) if t <= -T]
    window_part = _integrate(times, norms)
    tail_part = sum(_integrate([t for t, _ in seg], [n for _, n in seg]) for seg in (positive, negative))
    report = ResidualReport(
        frame=frame, window=T, horizon=horizon, cutoff_radius=radius if use_cutoffs else math.inf,
        frequency_cutoff=frequency if use_cutoffs else math.inf,
        residual=factor * (window_part + tail_part),
        window_residual=factor * window_part, tail_residual=factor * tail_part,
        initial_mismatch=initial_mismatch, stitch_defect=stitch_defect,
        times=sorted(times + tail_times),
        norms=[n for _, n in sorted(zip(times + tail_times, norms + tail_norms))],
    )
    lab_logger.log_experiment_cell(EXPERIMENT_NAME, f"N={frame.N:g} T={T:g}",
                                   {"residual": report.residual, "mismatch": initial_mismatch})
    return report
