# 两点边值问题（打靶法）模块
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .flow import DEFAULT_DT, integrate
from .focal import analytic_focal_bound
from ..potential.potential import Potential, as_points
from ..utils.exceptions import ConvergenceException, FocalTimeException
from ..utils.logger import lab_logger

BVP_TOL = 1e-10
BVP_MAX_ITER = 25


@dataclass
class BVPBatch:
    """批量打靶结果：初始动量、终点动量、离散作用量和收敛信息"""
    eta: np.ndarray
    xi_end: np.ndarray
    action: np.ndarray
    iterations: int
    residual: float


@dataclass
class BVPSolution:
    """单个两点边值问题的解"""
    eta: np.ndarray
    iterations: int
    residual: float


def check_focal(p: Potential, t: Any, d: int, focal_bound: Optional[float]) -> float:
    """检查 0 < |t| ≤ δ₀，返回所用的界"""
    bound = analytic_focal_bound(p, d) if focal_bound is None else float(focal_bound)
    t_arr = np.abs(np.asarray(t, dtype=float))
    if np.any(t_arr == 0.0):
        raise FocalTimeException(0.0, bound)
    if np.any(t_arr > bound):
        raise FocalTimeException(float(t_arr.max()), bound)
    return bound


def shoot(p: Potential, y: Any, x: Any, t: Any, dt: float = DEFAULT_DT,
          tol: float = BVP_TOL, max_iter: int = BVP_MAX_ITER,
          focal_bound: Optional[float] = None, polish: bool = True) -> BVPBatch:
    """批量 Newton 打靶：求 η 使 |x(t; y, η) - x| ≤ tol（绝对误差）

    初值 η₀ = (x - y)/t；Jacobian 是与离散流精确一致的变分矩阵 ∂x/∂η，
    所以收敛是二次的。达到容差后再做一步修正，使作用量的对称性达到舍入误差量级。

    Raises:
        FocalTimeException: t = 0 或 |t| 超出焦点界
        ConvergenceException: max_iter 次迭代后未收敛
    """
    y = as_points(y)
    x = np.broadcast_to(as_points(x), np.broadcast_shapes(y.shape, as_points(x).shape))
    y = np.broadcast_to(y, x.shape)
    d = x.shape[-1]
    t_arr = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1])
    check_focal(p, t_arr, d, focal_bound)

    eta = (x - y) / t_arr[..., None]
    polished = not polish
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        result = integrate(p, y, eta, t_arr, dt=dt, tangent=True, action=True)
        miss = result.x - x
        residual = float(np.max(np.linalg.norm(miss, axis=-1))) if miss.size else 0.0
        if residual <= tol and polished:
            lab_logger.log_bvp_convergence(int(np.prod(x.shape[:-1])), iteration, residual)
            return BVPBatch(eta=eta, xi_end=result.xi, action=result.action,
                            iterations=iteration, residual=residual)
        if residual <= tol:
            polished = True
        if d == 1:
            eta = eta - miss / result.dxdeta[..., 0]
        else:
            eta = eta - np.linalg.solve(result.dxdeta, miss[..., None])[..., 0]
    raise ConvergenceException(max_iter, residual)


def solve_bvp(p: Potential, y: Any, x: Any, t: float, dt: float = DEFAULT_DT,
              tol: float = BVP_TOL, max_iter: int = BVP_MAX_ITER,
              focal_bound: Optional[float] = None) -> BVPSolution:
    """求初始动量 η，使从 y 出发的轨道在时间 t 到达 x

    Args:
        p: 位势
        y: 起点
        x: 终点
        t: 时间，要求 0 < |t| ≤ δ₀
        focal_bound: δ₀；缺省用 Hessian 上界给出的解析下界

    Returns:
        BVPSolution
    """
    batch = shoot(p, as_points(y)[None, :], as_points(x)[None, :], np.array([t]), dt=dt,
                  tol=tol, max_iter=max_iter, focal_bound=focal_bound)
    return BVPSolution(eta=batch.eta[0], iterations=batch.iterations, residual=batch.residual)
