# 色散估计诊断模块
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import math
import numpy as np

from .fujiwara import fujiwara_apply
from .grid import Field
from .spectral import spectral_propagate
from ..classical.bvp import check_focal
from ..potential.potential import Potential
from ..utils.exceptions import NonFiniteException
from ..utils.logger import lab_logger
from config.enums import ResolutionPolicy


@dataclass
class DispersiveSeries:
    """t^{d/2}‖e^{-itH}f‖_∞ / ‖f‖₁ 关于 t 的序列"""
    times: List[float]
    ratios: List[float]
    method: str
    focal_bound: float
    l1_norm: float
    sup_norms: List[float] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    def rows(self):
        return zip(self.times, self.sup_norms, self.ratios)

    def to_dict(self):
        return {
            "method": self.method,
            "focal_bound": self.focal_bound,
            "l1_norm": self.l1_norm,
            "max_ratio": self.max_ratio,
            "times": self.times,
            "ratios": self.ratios,
        }


def free_gaussian_ratio(t: float) -> float:
    """自由演化下 e^{-x²/2} 的精确比值 √t (1+t²)^{-1/4} / √(2π)（一维）

    t → ∞ 时趋于 (2π)^{-1/2}，并不是常数。
    """
    return math.sqrt(abs(t)) * (1.0 + t * t) ** -0.25 / math.sqrt(2.0 * math.pi)


def harmonic_ratio_bound(t: float, d: int = 1) -> float:
    """谐振子的核上界 |K| = (2π|sin t|)^{-d/2} 给出的比值上界"""
    return (abs(t) / (2.0 * math.pi * abs(math.sin(t)))) ** (d / 2.0)


def dispersive_ratio(p: Potential, f: Field, t_list: Sequence[float],
                     focal_bound: Optional[float] = None, order: int = 2,
                     policy: ResolutionPolicy = ResolutionPolicy.STRICT) -> DispersiveSeries:
    """对每个 t 计算 t^{d/2}‖e^{-itH}f‖_∞/‖f‖₁

    一维用谱方法真值，高维用 Fujiwara 传播子。离散范数：‖f‖₁ = h^d Σ|f|，‖f‖_∞ = max|f|。

    Raises:
        FocalTimeException: 某个 t 不在 (0, δ₀] 内
        NonFiniteException: 比值非有限
    """
    d = f.grid.d
    bound = check_focal(p, np.asarray(list(t_list), dtype=float), d, focal_bound)
    l1 = f.norm_l1()
    method = "spectral" if d == 1 else "fujiwara"
    series = DispersiveSeries(times=[], ratios=[], method=method, focal_bound=bound, l1_norm=l1)
    for t in t_list:
        if d == 1:
            u = spectral_propagate(p, f, t, order=order)
        else:
            u = fujiwara_apply(p, f, t, policy=policy, focal_bound=bound)
        sup = u.norm_sup()
        ratio = abs(t) ** (d / 2.0) * sup / l1
        if not math.isfinite(ratio) or ratio <= 0:
            raise NonFiniteException(f"t={t} 时的色散比值 {ratio}")
        series.times.append(float(t))
        series.sup_norms.append(sup)
        series.ratios.append(ratio)
    lab_logger.log_info(f"色散比值（{method}）: 最大值 {series.max_ratio:.6g}，共 {len(series.times)} 个时间点")
    return series
