# 经典哈密顿流模块
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..potential.potential import Potential, as_points
from ..utils.exceptions import DomainException, NonFiniteException
from ..utils.output_writer import write_csv

DEFAULT_DT = 1e-3

# 四阶对称复合（三次跳跃）：每一步由三个 Störmer–Verlet 子步组成
_CBRT2 = 2.0 ** (1.0 / 3.0)
SUBSTEP_WEIGHTS = (1.0 / (2.0 - _CBRT2), -_CBRT2 / (2.0 - _CBRT2), 1.0 / (2.0 - _CBRT2))


@dataclass
class FlowResult:
    """一次积分的结果

    x, xi 为终点；tangent=True 时给出 ∂x/∂y 与 ∂x/∂η；
    action=True 时给出离散作用量；record=True 时给出整条轨道。
    """
    x: np.ndarray
    xi: np.ndarray
    steps: int
    dxdy: Optional[np.ndarray] = None
    dxdeta: Optional[np.ndarray] = None
    action: Optional[np.ndarray] = None
    times: Optional[np.ndarray] = None
    path_x: Optional[np.ndarray] = None
    path_xi: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    """相空间轨道 (x, ξ) 在每个时间步上的取值"""
    potential: Potential
    times: np.ndarray
    x: np.ndarray
    xi: np.ndarray

    def energies(self) -> np.ndarray:
        """H(x, ξ) = |ξ|²/2 + V(x) 沿轨道的值"""
        return 0.5 * np.sum(self.xi ** 2, axis=-1) + self.potential.evaluate(self.x)

    def energy_drift(self) -> float:
        energies = self.energies()
        return float(np.max(np.abs(energies - energies[0])))

    def write_csv(self, path: str) -> str:
        d = self.x.shape[-1]
        header = ["t"] + [f"x{i}" for i in range(d)] + [f"xi{i}" for i in range(d)] + ["H"]
        energies = self.energies()
        rows = ([t] + list(x) + list(xi) + [h]
                for t, x, xi, h in zip(self.times, self.x, self.xi, energies))
        return write_csv(path, header, rows)


def _hess_apply(hess: np.ndarray, mat: np.ndarray) -> np.ndarray:
    # 一维时逐元素相乘即可，避免大批量 1×1 矩阵乘法
    if hess.shape[-1] == 1:
        return hess * mat
    return hess @ mat


def _check_finite(*arrays: np.ndarray, what: str) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteException(what)


def integrate(p: Potential, y: Any, eta: Any, t: Any, dt: float = DEFAULT_DT,
              tangent: bool = False, action: bool = False, record: bool = False,
              min_steps: int = 1) -> FlowResult:
    """批量积分 ẋ = ξ, ξ̇ = -∇V(x)

    所有样本使用相同步数 ⌈max|t|/dt⌉，每个样本的步长为 t/步数，
    因此每个样本恰好到达自己的终止时间（t 可以为负，此时向后积分）。

    Args:
        p: 位势
        y: 初始位置，形状 (..., d)
        eta: 初始动量，形状 (..., d)
        t: 终止时间，标量或形状 (...)
        dt: 最大步长
        tangent: 是否同时积分变分方程（得到 ∂x/∂y, ∂x/∂η）
        action: 是否累计离散作用量 Σ L_d
        record: 是否记录整条轨道（仅用于单条轨道的导出）
        min_steps: 最少步数

    Returns:
        FlowResult

    Raises:
        NonFiniteException: 轨道出现非有限值
    """
    x = as_points(y).copy()
    xi = np.broadcast_to(as_points(eta), x.shape).copy()
    d = x.shape[-1]
    p.check_dim(d)
    t_arr = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1])
    if dt <= 0:
        raise DomainException(f"步长必须为正，实际: {dt}")
    t_max = float(np.max(np.abs(t_arr))) if t_arr.size else 0.0
    steps = max(int(min_steps), int(math.ceil(t_max / dt - 1e-12)) if t_max > 0 else 0)
    steps = max(steps, 1)
    h = t_arr / steps

    grad = p.gradient(x)
    pot = p.evaluate(x) if action else None
    if tangent:
        eye = np.broadcast_to(np.eye(d), x.shape[:-1] + (d, d))
        zero = np.zeros(x.shape[:-1] + (d, d))
        big_x = np.concatenate([eye, zero], axis=-1)
        big_xi = np.concatenate([zero, eye], axis=-1)
        hess = p.hessian(x)
    total = np.zeros(x.shape[:-1]) if action else None

    path_x = [x.copy()] if record else None
    path_xi = [xi.copy()] if record else None

    for _ in range(steps):
        for weight in SUBSTEP_WEIGHTS:
            hs = weight * h
            hv = hs[..., None]
            xi_half = xi - 0.5 * hv * grad
            x_new = x + hv * xi_half
            grad_new = p.gradient(x_new)
            xi = xi_half - 0.5 * hv * grad_new
            if tangent:
                hm = hs[..., None, None]
                big_xi_half = big_xi - 0.5 * hm * _hess_apply(hess, big_x)
                big_x = big_x + hm * big_xi_half
                hess = p.hessian(x_new)
                big_xi = big_xi_half - 0.5 * hm * _hess_apply(hess, big_x)
            if action:
                pot_new = p.evaluate(x_new)
                dx = x_new - x
                with np.errstate(divide="ignore", invalid="ignore"):
                    kinetic = np.where(hs != 0, np.sum(dx * dx, axis=-1) / (2.0 * hs), 0.0)
                total = total + kinetic - 0.5 * hs * (pot + pot_new)
                pot = pot_new
            x = x_new
            grad = grad_new
        if record:
            path_x.append(x.copy())
            path_xi.append(xi.copy())

    _check_finite(x, xi, what="经典轨道")
    result = FlowResult(x=x, xi=xi, steps=steps)
    if tangent:
        _check_finite(big_x, what="变分方程")
        result.dxdy = big_x[..., :d]
        result.dxdeta = big_x[..., d:]
    if action:
        result.action = total
    if record:
        result.times = np.linspace(0.0, 1.0, steps + 1)[:, None] * t_arr.reshape(1, -1)
        result.times = result.times.reshape((steps + 1,) + t_arr.shape)
        result.path_x = np.stack(path_x)
        result.path_xi = np.stack(path_xi)
    return result


def flow(p: Potential, y: Any, eta: Any, T: float, dt: float = DEFAULT_DT) -> Trajectory:
    """从 (y, η) 出发积分到时间 T，返回每一步的 (x, ξ)

    共 ⌈|T|/dt⌉ 步；T < 0 时按时间反演向后积分。
    """
    y = as_points(y)
    if y.ndim != 1:
        raise DomainException(f"flow 只接受单个初值点，实际形状: {y.shape}")
    result = integrate(p, y, eta, float(T), dt=dt, record=True)
    return Trajectory(potential=p, times=result.times, x=result.path_x, xi=result.path_xi)


def monodromy(p: Potential, y: Any, eta: Any, t: Any, dt: float = DEFAULT_DT):
    """(∂x/∂y, ∂x/∂η) 在时间 t 的值

    小时间下 ∂x/∂y = I + O(t²)，∂x/∂η = tI + O(t³)。
    """
    result = integrate(p, y, eta, t, dt=dt, tangent=True)
    return result.dxdy, result.dxdeta
