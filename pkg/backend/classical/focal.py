# 焦点时间估计模块
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union, Sequence

import numpy as np
from scipy.optimize import brentq

from .flow import DEFAULT_DT, SUBSTEP_WEIGHTS
from ..potential.potential import Potential
from ..potential.hypothesis import Box, sample_box
from ..utils.exceptions import DomainException, NonFiniteException
from ..utils.logger import lab_logger

# 归一化行列式 det(∂x/∂η / t) 的阈值
FOCAL_THRESHOLD = 0.5


def analytic_focal_bound(p: Potential, d: int, threshold: float = FOCAL_THRESHOLD) -> float:
    """由 Hessian 上界 M 给出的焦点时间下界

    在每个方向都以频率 ω = √M 振动时 det(∂x/∂η / t) = (sin ωt / ωt)^d，
    取它等于阈值的时刻。M = 0 时为 +∞。
    """
    bound = p.hessian_bound(d)
    if not np.isfinite(bound):
        raise DomainException(f"位势 {p.name} 没有有限的 Hessian 上界，无法给出焦点时间")
    if bound <= 0:
        return math.inf
    target = threshold ** (1.0 / d)
    s = brentq(lambda s: math.sin(s) / s - target, 1e-12, math.pi)
    return s / math.sqrt(bound)


@dataclass
class FocalEstimate:
    """焦点时间估计：δ₀ 及最小归一化行列式随时间的序列"""
    delta0: float
    t_max: float
    threshold: float
    samples: int
    times: np.ndarray = field(repr=False)
    min_det: np.ndarray = field(repr=False)

    @property
    def crossed(self) -> bool:
        return self.delta0 < self.t_max

    def to_dict(self) -> Dict[str, Any]:
        return {
            "delta0": self.delta0,
            "t_max": self.t_max,
            "threshold": self.threshold,
            "samples": self.samples,
            "crossed": self.crossed,
        }


def focal_time(p: Potential, region: Union[Box, Sequence[Any]], t_max: float,
               samples: int = 256, momentum_box: Optional[Union[Box, Sequence[Any]]] = None,
               dt: float = DEFAULT_DT, threshold: float = FOCAL_THRESHOLD,
               seed: int = 0) -> FocalEstimate:
    """估计 δ₀：在采样初值上 det(∂x/∂η / t) 首次低于阈值之前的最后时刻

    Args:
        p: 位势
        region: 初始位置的采样盒子
        t_max: 扫描的最长时间
        samples: 采样数
        momentum_box: 初始动量的采样盒子，缺省与 region 相同
        dt: 步长
        threshold: 阈值（默认 1/2）
        seed: 采样种子

    Returns:
        FocalEstimate；从未越过阈值时 δ₀ = t_max
    """
    region = Box.coerce(region)
    momentum_box = region if momentum_box is None else Box.coerce(momentum_box, region.dim)
    d = region.dim
    p.check_dim(d)
    if t_max <= 0:
        raise DomainException(f"t_max 必须为正，实际: {t_max}")

    y = sample_box(region, samples, seed)
    eta = sample_box(momentum_box, samples, seed + 1)
    steps = max(1, int(math.ceil(t_max / dt - 1e-12)))
    h = t_max / steps

    x, xi = y.copy(), eta.copy()
    grad = p.gradient(x)
    hess = p.hessian(x)
    big_x = np.zeros((samples, d, d))
    big_xi = np.broadcast_to(np.eye(d), (samples, d, d)).copy()

    times: List[float] = []
    min_det: List[float] = []
    delta0 = t_max
    for k in range(1, steps + 1):
        for weight in SUBSTEP_WEIGHTS:
            hs = weight * h
            xi_half = xi - 0.5 * hs * grad
            x = x + hs * xi_half
            grad = p.gradient(x)
            xi = xi_half - 0.5 * hs * grad
            big_xi_half = big_xi - 0.5 * hs * (hess @ big_x)
            big_x = big_x + hs * big_xi_half
            hess = p.hessian(x)
            big_xi = big_xi_half - 0.5 * hs * (hess @ big_x)
        tau = k * h
        dets = np.linalg.det(big_x / tau)
        if not np.all(np.isfinite(dets)):
            raise NonFiniteException("焦点时间估计中的变分矩阵")
        times.append(tau)
        min_det.append(float(dets.min()))
        if min_det[-1] < threshold:
            delta0 = times[-2] if len(times) > 1 else 0.0
            break

    estimate = FocalEstimate(delta0=delta0, t_max=t_max, threshold=threshold, samples=samples,
                             times=np.asarray(times), min_det=np.asarray(min_det))
    lab_logger.log_info(f"位势 {p.name} 焦点时间估计 δ₀={delta0:.6g}（t_max={t_max:.6g}）")
    return estimate
