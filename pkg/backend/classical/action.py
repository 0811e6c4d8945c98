# 作用量模块
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .bvp import BVP_MAX_ITER, BVP_TOL, shoot
from .flow import DEFAULT_DT
from ..potential.potential import Potential, as_points
from ..utils.exceptions import DomainException

GAUSS_NODES = 16


@dataclass
class ActionResult:
    """作用量 S(t,x,y) 及其分解 S = |x-y|²/2t + tω"""
    S: float
    omega: float
    eta: np.ndarray
    iterations: int
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {"S": self.S, "omega": self.omega, "eta": self.eta.tolist(),
                "iterations": self.iterations, "residual": self.residual}


@dataclass
class ActionBatch:
    """批量作用量"""
    S: np.ndarray
    omega: np.ndarray
    eta: np.ndarray
    iterations: int
    residual: float


def action_batch(p: Potential, t: Any, x: Any, y: Any, dt: float = DEFAULT_DT,
                 tol: float = BVP_TOL, max_iter: int = BVP_MAX_ITER,
                 focal_bound: Optional[float] = None) -> ActionBatch:
    """批量计算 S(t,x,y) = ∫₀ᵗ (|ẋ|²/2 - V(x)) dτ

    沿离散轨道累计每个 Verlet 子步的离散拉格朗日量，与积分器同为四阶。
    """
    x = as_points(x)
    y = as_points(y)
    batch = shoot(p, y, x, t, dt=dt, tol=tol, max_iter=max_iter, focal_bound=focal_bound)
    t_arr = np.broadcast_to(np.asarray(t, dtype=float), batch.action.shape)
    free = np.sum((x - y) ** 2, axis=-1) / (2.0 * t_arr)
    omega = (batch.action - free) / t_arr
    return ActionBatch(S=batch.action, omega=omega, eta=batch.eta,
                       iterations=batch.iterations, residual=batch.residual)


def action(p: Potential, t: float, x: Any, y: Any, dt: float = DEFAULT_DT,
           focal_bound: Optional[float] = None) -> ActionResult:
    """单个 (t, x, y) 的作用量

    Args:
        p: 位势
        t: 时间，0 < |t| ≤ δ₀
        x: 终点
        y: 起点

    Returns:
        ActionResult
    """
    batch = action_batch(p, np.array([t]), as_points(x)[None, :], as_points(y)[None, :],
                         dt=dt, focal_bound=focal_bound)
    return ActionResult(S=float(batch.S[0]), omega=float(batch.omega[0]), eta=batch.eta[0],
                        iterations=batch.iterations, residual=batch.residual)


def straight_line_action(p: Potential, t: Any, x: Any, y: Any, nodes: int = GAUSS_NODES) -> np.ndarray:
    """直线近似 |x-y|²/2t - ∫₀ᵗ V(y + (x-y)τ/t) dτ（Gauss–Legendre 求积）

    与真实作用量之差为 O(t³(1+|x|²+|y|²))。
    """
    x = as_points(x)
    y = as_points(y)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr == 0):
        raise DomainException("直线作用量要求 t ≠ 0")
    ref, weights = np.polynomial.legendre.leggauss(nodes)
    tau = 0.5 * (ref + 1.0)
    weights = 0.5 * weights
    points = y[..., None, :] + (x - y)[..., None, :] * tau[:, None]
    line_integral = np.sum(weights * p.evaluate(points), axis=-1)
    return np.sum((x - y) ** 2, axis=-1) / (2.0 * t_arr) - t_arr * line_integral


def straight_line_remainder(p: Potential, times: Sequence[float], x: Any, y: Any,
                            dt: float = DEFAULT_DT) -> Dict[str, Any]:
    """|S - S_line| 随 t 的变化及其对数斜率（应接近 3）"""
    times = np.asarray(list(times), dtype=float)
    x = as_points(x)
    y = as_points(y)
    xs = np.broadcast_to(x, (times.size,) + x.shape)
    ys = np.broadcast_to(y, (times.size,) + y.shape)
    exact = action_batch(p, times, xs, ys, dt=dt).S
    line = straight_line_action(p, times, xs, ys)
    remainder = np.abs(exact - line)
    slope = float(np.polyfit(np.log(np.abs(times)), np.log(remainder), 1)[0])
    weight = np.abs(times) ** 3 * (1.0 + np.sum(x * x) + np.sum(y * y))
    return {
        "times": times.tolist(),
        "remainder": remainder.tolist(),
        "slope": slope,
        "normalized": (remainder / weight).tolist(),
    }


def harmonic_action_exact(t: Any, x: Any, y: Any) -> np.ndarray:
    """谐振子 V = |x|²/2 的闭式作用量 ((|x|²+|y|²)cos t - 2x·y) / (2 sin t)"""
    x = as_points(x)
    y = as_points(y)
    t_arr = np.asarray(t, dtype=float)
    return ((np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)) * np.cos(t_arr)
            - 2.0 * np.sum(x * y, axis=-1)) / (2.0 * np.sin(t_arr))
