# 非线性 Schrödinger 问题定义模块
from dataclasses import dataclass
from typing import Optional

from ..linprop.grid import GridSpec
from ..potential.potential import Potential
from ..utils.exceptions import DomainException


def default_power(d: int) -> float:
    """缺省非线性指数：d ≥ 3 取能量临界 4/(d-2)，d = 1, 2 取质量临界 4/d"""
    if d >= 3:
        return 4.0 / (d - 2)
    return 4.0 / d


def nonlinearity_constant(power: float) -> float:
    """能量中非线性项的系数 c_p = 2/(p+2)

    在能量临界情形 p = 4/(d-2) 下恰好等于 1 - 2/d。
    """
    return 2.0 / (power + 2.0)


def strichartz_exponent(power: float, d: int) -> float:
    """与尺度不变性匹配的时空指数 q = p(d+2)/2（能量临界时为 2(d+2)/(d-2)）"""
    return power * (d + 2) / 2.0


@dataclass
class NLSProblem:
    """i∂_t u = (-Δ/2 + V)u + μ|u|^p u

    mu = +1 散焦，-1 聚焦，0 为线性。
    """
    potential: Potential
    mu: int
    grid: GridSpec
    power: Optional[float] = None

    def __post_init__(self):
        if self.mu not in (-1, 0, 1):
            raise DomainException(f"μ 必须是 -1、0 或 +1，实际: {self.mu}")
        if self.power is None:
            self.power = default_power(self.grid.d)
        self.power = float(self.power)
        if not self.power > 0:
            raise DomainException(f"非线性指数必须为正，实际: {self.power}")
        self.potential.check_dim(self.grid.d)

    @property
    def c_p(self) -> float:
        return nonlinearity_constant(self.power)

    @property
    def q(self) -> float:
        return strichartz_exponent(self.power, self.grid.d)

    @property
    def energy_critical(self) -> bool:
        d = self.grid.d
        return d >= 3 and abs(self.power - 4.0 / (d - 2)) < 1e-12

    def with_mu(self, mu: int) -> 'NLSProblem':
        return NLSProblem(self.potential, mu, self.grid, self.power)

    def to_dict(self):
        return {
            "potential": self.potential.to_dict(),
            "mu": self.mu,
            "power": self.power,
            "c_p": self.c_p,
            "grid": self.grid.to_dict(),
        }
