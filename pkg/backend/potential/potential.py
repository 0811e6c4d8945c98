# 位势模块
from __future__ import annotations

import json
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from ..utils.exceptions import DomainException, NonFiniteException


def as_points(x: Any, d: Optional[int] = None) -> np.ndarray:
    """把输入整理为形如 (..., d) 的浮点点集

    标量视为一维中的单点；d 给定且最后一维不符时报错。
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if d is not None and arr.shape[-1] != d:
        raise DomainException(f"点的维数 {arr.shape[-1]} 与位势维数 {d} 不一致")
    return arr


class Potential(ABC):
    """外位势 V: R^d → R 的抽象基类

    约定点集的最后一维是空间维数。所有内置位势都给出梯度与 Hessian 的闭式，
    并记录 δ|x|² ≤ V ≤ δ'^{-1}(1+|x|²) 中的两个常数以及 Hessian 范数上界。
    """

    name: str = "potential"

    def __init__(self, delta: float, upper_delta: float, hess_bound: float,
                 dim: Optional[int] = None):
        self.delta = float(delta)
        self.upper_delta = float(upper_delta)
        self.hess_bound = float(hess_bound)
        self.dim = dim

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """V(x)，返回形状 (...)"""

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        """∇V(x)，返回形状 (..., d)"""

    @abstractmethod
    def hessian(self, x: np.ndarray) -> np.ndarray:
        """∇²V(x)，返回形状 (..., d, d)"""

    @abstractmethod
    def derivative_bound(self, order: int) -> float:
        """sup|∂^k V| 的上界（k ≥ 2）"""

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        """构造参数（用于缓存键与清单）"""

    verified_order: Optional[int] = None  # None 表示所有阶导数均有闭式

    def hessian_bound(self, d: int) -> float:
        """d 维中 ‖∇²V‖ 的上界"""
        return self.hess_bound

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x)

    def check_dim(self, d: int) -> None:
        if self.dim is not None and self.dim != d:
            raise DomainException(f"位势 {self.name} 定义在 {self.dim} 维，不能用于 {d} 维")

    def cache_key(self) -> str:
        """稳定的缓存键"""
        return json.dumps({"name": self.name, "params": self.params()}, sort_keys=True)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": self.params(),
            "delta": self.delta,
            "upper_delta": self.upper_delta,
            "hess_bound": self.hess_bound,
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params()})"


class ZeroPotential(Potential):
    """V ≡ 0（不满足强制性假设，仅作为无位势对照）"""

    name = "zero"

    def __init__(self):
        super().__init__(delta=0.0, upper_delta=float("inf"), hess_bound=0.0)

    def evaluate(self, x):
        x = as_points(x)
        return np.zeros(x.shape[:-1])

    def gradient(self, x):
        return np.zeros_like(as_points(x))

    def hessian(self, x):
        x = as_points(x)
        return np.zeros(x.shape + (x.shape[-1],))

    def derivative_bound(self, order):
        return 0.0

    def params(self):
        return {}


class IsotropicQuadraticPotential(Potential):
    """V(x) = δ|x|²"""

    name = "isotropic_quadratic"

    def __init__(self, delta: float):
        if not delta > 0:
            raise DomainException(f"各向同性二次位势要求 δ > 0，实际: {delta}")
        super().__init__(delta=delta, upper_delta=1.0 / delta, hess_bound=2.0 * delta)
        self.coefficient = float(delta)

    def evaluate(self, x):
        x = as_points(x)
        return self.coefficient * np.sum(x * x, axis=-1)

    def gradient(self, x):
        return 2.0 * self.coefficient * as_points(x)

    def hessian(self, x):
        x = as_points(x)
        d = x.shape[-1]
        return np.broadcast_to(2.0 * self.coefficient * np.eye(d), x.shape + (d,)).copy()

    def derivative_bound(self, order):
        return 2.0 * self.coefficient if order == 2 else 0.0

    def params(self):
        return {"delta": self.coefficient}


class HarmonicPotential(IsotropicQuadraticPotential):
    """V(x) = |x|²/2，Mehler 核对应的谐振子"""

    name = "harmonic"

    def __init__(self):
        super().__init__(0.5)

    def params(self):
        return {}


class AnisotropicQuadraticPotential(Potential):
    """V(x) = Σ c_i x_i²，c_i > 0"""

    name = "anisotropic_quadratic"

    def __init__(self, coeffs: Sequence[float]):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0 or np.any(coeffs <= 0):
            raise DomainException(f"各向异性系数必须全为正，实际: {coeffs.tolist()}")
        super().__init__(delta=float(coeffs.min()), upper_delta=1.0 / float(coeffs.max()),
                         hess_bound=2.0 * float(coeffs.max()), dim=int(coeffs.size))
        self.coeffs = coeffs

    def evaluate(self, x):
        x = as_points(x, self.dim)
        return np.sum(self.coeffs * x * x, axis=-1)

    def gradient(self, x):
        return 2.0 * self.coeffs * as_points(x, self.dim)

    def hessian(self, x):
        x = as_points(x, self.dim)
        return np.broadcast_to(np.diag(2.0 * self.coeffs), x.shape + (self.dim,)).copy()

    def derivative_bound(self, order):
        return 2.0 * float(self.coeffs.max()) if order == 2 else 0.0

    def params(self):
        return {"coeffs": self.coeffs.tolist()}


class PerturbedQuadraticPotential(Potential):
    """V(x) = δ|x|² + ε sin²(k·x)

    要求 δ > 0 且 ε ≥ 0；ε 不受 δ 约束，下界 V ≥ δ|x|² 对任意 ε ≥ 0 成立。
    k 可为标量（在任意维数下广播为 (k, …, k)）或定长向量。
    """

    name = "perturbed_quadratic"

    def __init__(self, delta: float, eps: float, k: Any = 1.0):
        k_arr = np.atleast_1d(np.asarray(k, dtype=float))
        dim = None if k_arr.size == 1 else int(k_arr.size)
        k_norm2 = float(np.sum(k_arr ** 2)) if dim is not None else float(k_arr[0] ** 2)
        if not delta > 0 or eps < 0:
            raise DomainException(f"扰动二次位势要求 δ > 0 且 ε ≥ 0，实际 δ={delta}, ε={eps}")
        super().__init__(delta=delta, upper_delta=1.0 / max(delta, eps),
                         hess_bound=2.0 * delta + 2.0 * eps * k_norm2, dim=dim)
        self.coefficient = float(delta)
        self.eps = float(eps)
        self.k = k_arr
        self._scalar_k = dim is None

    def _wave_vector(self, d: int) -> np.ndarray:
        if self._scalar_k:
            return np.full(d, self.k[0])
        return self.k

    def hessian_bound(self, d: int) -> float:
        kv = self._wave_vector(d)
        return 2.0 * self.coefficient + 2.0 * self.eps * float(kv @ kv)

    def evaluate(self, x):
        x = as_points(x, self.dim)
        phase = x @ self._wave_vector(x.shape[-1])
        return self.coefficient * np.sum(x * x, axis=-1) + self.eps * np.sin(phase) ** 2

    def gradient(self, x):
        x = as_points(x, self.dim)
        kv = self._wave_vector(x.shape[-1])
        phase = x @ kv
        return 2.0 * self.coefficient * x + self.eps * np.sin(2.0 * phase)[..., None] * kv

    def hessian(self, x):
        x = as_points(x, self.dim)
        d = x.shape[-1]
        kv = self._wave_vector(d)
        phase = x @ kv
        return (2.0 * self.coefficient * np.eye(d)
                + 2.0 * self.eps * np.cos(2.0 * phase)[..., None, None] * np.outer(kv, kv))

    def derivative_bound(self, order):
        k_norm = float(np.linalg.norm(self.k)) if not self._scalar_k else abs(float(self.k[0]))
        bound = self.eps * 2.0 ** (order - 1) * k_norm ** order
        return bound + (2.0 * self.coefficient if order == 2 else 0.0)

    def params(self):
        k_value = float(self.k[0]) if self._scalar_k else self.k.tolist()
        return {"delta": self.coefficient, "eps": self.eps, "k": k_value}


class RescaledPotential(Potential):
    """集中态坐标中看到的位势 V_N(y) = N^{-2} V(center + y/N)

    若 ψ = G_N φ 以 center 为中心、尺度 1/N，则
    G_N^{-1} e^{-itH} G_N = e^{-i N² t H_N}，H_N = -Δ/2 + V_N。
    """

    def __init__(self, base: Potential, center: Any, scale: float):
        if not scale > 0:
            raise DomainException(f"缩放因子必须为正，实际: {scale}")
        self.base = base
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.scale = float(scale)
        n2 = self.scale ** -2
        super().__init__(delta=0.0, upper_delta=float("inf"),
                         hess_bound=base.hess_bound * n2 * n2, dim=base.dim)
        self.name = f"rescaled_{base.name}"

    def _physical(self, y: np.ndarray) -> np.ndarray:
        y = as_points(y)
        if self.center.size not in (1, y.shape[-1]):
            raise DomainException(f"中心维数 {self.center.size} 与点维数 {y.shape[-1]} 不一致")
        return self.center + y / self.scale

    def evaluate(self, y):
        return self.scale ** -2 * self.base.evaluate(self._physical(y))

    def gradient(self, y):
        return self.scale ** -3 * self.base.gradient(self._physical(y))

    def hessian(self, y):
        return self.scale ** -4 * self.base.hessian(self._physical(y))

    def hessian_bound(self, d):
        return self.scale ** -4 * self.base.hessian_bound(d)

    def derivative_bound(self, order):
        return self.scale ** (-2 - order) * self.base.derivative_bound(order)

    def params(self):
        return {"base": json.loads(self.base.cache_key()),
                "center": self.center.tolist(), "scale": self.scale}


class CallablePotential(Potential):
    """用户提供的位势函数

    缺省的梯度和 Hessian 用中心差分计算；这类位势只验证到二阶导数。
    """

    name = "callable"
    verified_order = 2

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray],
                 gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 delta: float = 0.0, upper_delta: float = float("inf"),
                 hess_bound: float = float("inf"), label: str = "callable",
                 fd_step: float = 1e-4):
        super().__init__(delta=delta, upper_delta=upper_delta, hess_bound=hess_bound)
        self._fn = fn
        self._gradient = gradient
        self._hessian = hessian
        self.label = label
        self.fd_step = fd_step

    def evaluate(self, x):
        x = as_points(x)
        values = np.asarray(self._fn(x), dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFiniteException(f"位势 {self.label} 的取值")
        return values

    def gradient(self, x):
        x = as_points(x)
        if self._gradient is not None:
            return np.asarray(self._gradient(x), dtype=float)
        return finite_difference_gradient(self.evaluate, x, self.fd_step)

    def hessian(self, x):
        x = as_points(x)
        if self._hessian is not None:
            return np.asarray(self._hessian(x), dtype=float)
        return finite_difference_hessian(self.gradient, x, self.fd_step)

    def derivative_bound(self, order):
        return self.hess_bound if order == 2 else float("nan")

    def params(self):
        return {"label": self.label}


def _central_difference(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, e: np.ndarray,
                        step: float, order: int) -> np.ndarray:
    if order == 2:
        return (fn(x + e) - fn(x - e)) / (2 * step)
    if order == 4:
        return (-fn(x + 2 * e) + 8 * fn(x + e) - 8 * fn(x - e) + fn(x - 2 * e)) / (12 * step)
    raise DomainException(f"中心差分阶数必须是 2 或 4，实际: {order}")


def finite_difference_gradient(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                               step: float = 1e-4, order: int = 4) -> np.ndarray:
    """中心差分梯度（缺省四阶）"""
    x = as_points(x)
    d = x.shape[-1]
    grad = np.empty(x.shape)
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        grad[..., i] = _central_difference(fn, x, e, step, order)
    return grad


def finite_difference_hessian(grad_fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                              step: float = 1e-4, order: int = 4) -> np.ndarray:
    """由梯度的中心差分（缺省四阶）得到 Hessian，并对称化"""
    x = as_points(x)
    d = x.shape[-1]
    hess = np.empty(x.shape + (d,))
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        hess[..., :, j] = _central_difference(grad_fn, x, e, step, order)
    return 0.5 * (hess + np.swapaxes(hess, -1, -2))
