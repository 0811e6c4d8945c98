# 守恒量与时空范数模块
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .problem import NLSProblem
from ..linprop.grid import Field
from ..utils.exceptions import DomainException
from ..utils.output_writer import write_csv

OBSERVABLE_COLUMNS = ["t", "mass", "energy", "kinetic", "qh", "sup_norm", "strichartz_density"]


def potential_energy(prob: NLSProblem, u: Field) -> float:
    """∫ V|u|²"""
    v = prob.potential.evaluate(u.grid.points())
    return float(np.sum(v * np.abs(u.values) ** 2) * u.grid.cell_volume)


def nonlinear_integral(prob: NLSProblem, u: Field) -> float:
    """∫ |u|^{p+2}"""
    return float(np.sum(np.abs(u.values) ** (prob.power + 2.0)) * u.grid.cell_volume)


def energy(prob: NLSProblem, u: Field) -> float:
    """E(u) = ∫ ½|∇u|² + V|u|² + μ c_p |u|^{p+2}，c_p = 2/(p+2)

    动能用谱导数计算，与分裂格式的动能子步一致。
    """
    kinetic = 0.5 * u.kinetic()
    total = kinetic + potential_energy(prob, u)
    if prob.mu != 0:
        total += prob.mu * prob.c_p * nonlinear_integral(prob, u)
    return float(total)


def qh_form(prob: NLSProblem, u: Field) -> float:
    """⟨u, Hu⟩ = ½‖∇u‖² + ∫V|u|²"""
    return float(0.5 * u.kinetic() + potential_energy(prob, u))


def strichartz_density(prob: NLSProblem, u: Field) -> float:
    """‖u(t)‖_q^q，q = p(d+2)/2"""
    return float(np.sum(np.abs(u.values) ** prob.q) * u.grid.cell_volume)


@dataclass
class ObservableSeries:
    """按记录时间排列的观测量"""
    times: List[float] = field(default_factory=list)
    mass: List[float] = field(default_factory=list)
    energy: List[float] = field(default_factory=list)
    kinetic: List[float] = field(default_factory=list)
    qh: List[float] = field(default_factory=list)
    sup_norm: List[float] = field(default_factory=list)
    strichartz_density: List[float] = field(default_factory=list)

    def record(self, prob: NLSProblem, t: float, u: Field) -> None:
        self.times.append(float(t))
        self.mass.append(u.mass())
        self.energy.append(energy(prob, u))
        self.kinetic.append(u.kinetic())
        self.qh.append(qh_form(prob, u))
        self.sup_norm.append(u.norm_sup())
        self.strichartz_density.append(strichartz_density(prob, u))

    def __len__(self) -> int:
        return len(self.times)

    def mass_drift(self) -> float:
        """max |M(t) - M(0)| / M(0)"""
        if not self.mass or self.mass[0] == 0:
            return 0.0
        mass = np.asarray(self.mass)
        return float(np.max(np.abs(mass - mass[0])) / mass[0])

    def energy_drift(self) -> float:
        """max |E(t) - E(0)|"""
        if not self.energy:
            return 0.0
        e = np.asarray(self.energy)
        return float(np.max(np.abs(e - e[0])))

    def rows(self):
        return zip(self.times, self.mass, self.energy, self.kinetic, self.qh,
                   self.sup_norm, self.strichartz_density)

    def write_csv(self, path: str) -> str:
        return write_csv(path, OBSERVABLE_COLUMNS, self.rows())

    def summary(self):
        return {
            "records": len(self.times),
            "t_final": self.times[-1] if self.times else 0.0,
            "mass_drift": self.mass_drift(),
            "energy_drift": self.energy_drift(),
            "max_sup_norm": max(self.sup_norm) if self.sup_norm else 0.0,
        }


def strichartz_S(series: ObservableSeries, interval: Tuple[float, float]) -> float:
    """S_I(u) = ∫_I ‖u(t)‖_q^q dt（梯形公式，端点线性插值）

    Raises:
        DomainException: 区间超出记录范围
    """
    if len(series) == 0:
        raise DomainException("观测序列为空")
    a, b = sorted(float(s) for s in interval)
    times = np.asarray(series.times)
    density = np.asarray(series.strichartz_density)
    order = np.argsort(times)
    times, density = times[order], density[order]
    span = max(1e-12, 1e-9 * (times[-1] - times[0]))
    if a < times[0] - span or b > times[-1] + span:
        raise DomainException(f"区间 [{a}, {b}] 超出记录范围 [{times[0]}, {times[-1]}]")
    a, b = max(a, times[0]), min(b, times[-1])
    if a == b:
        return 0.0
    inside = (times > a) & (times < b)
    grid_t = np.concatenate([[a], times[inside], [b]])
    grid_f = np.interp(grid_t, times, density)
    return float(trapezoid(grid_f, grid_t))


def exceeds_blowup_caps(sup: float, kinetic: float, sup0: float, kinetic0: float,
                        blowup_factor: float, grad_factor: float) -> bool:
    """上确界或动能是否超过初值的给定倍数"""
    return sup > blowup_factor * sup0 or (kinetic0 > 0 and kinetic > grad_factor * kinetic0)


def detect_blowup(series: ObservableSeries, blowup_factor: float = 1e3,
                  grad_factor: float = 1e3) -> Optional[float]:
    """上确界或动能首次超过初值的给定倍数的时间；未检测到返回 None

    这只是数值寿命的上界估计，不是爆破时间的渐近。
    """
    if len(series) == 0:
        return None
    sup0, kin0 = series.sup_norm[0], series.kinetic[0]
    for t, sup, kin in zip(series.times, series.sup_norm, series.kinetic):
        if exceeds_blowup_caps(sup, kin, sup0, kin0, blowup_factor, grad_factor):
            return float(t)
    return None
