# Mehler 核模块（谐振子 V = |x|²/2 的精确传播子）
import math

import numpy as np

from .grid import Field
from ..utils.exceptions import ResolutionException


def mehler_prefactor(t: float) -> complex:
    """一维前因子 (2πi sin t)^{-1/2}，|t| > π 时带上 Maslov 相位"""
    tt = abs(t)
    s = math.sin(tt)
    m = math.floor(tt / math.pi)
    phase = -0.25 * math.pi * math.copysign(1.0, s) - math.pi * math.ceil(m / 2)
    value = (2.0 * math.pi * abs(s)) ** -0.5 * complex(math.cos(phase), math.sin(phase))
    return value if t > 0 else value.conjugate()


def mehler_matrix(axis: np.ndarray, t: float, h: float) -> np.ndarray:
    """一维 Mehler 核乘以求积权 h 得到的矩阵 K[i, j]"""
    s = math.sin(t)
    c = math.cos(t)
    x = axis[:, None]
    y = axis[None, :]
    phase = ((x * x + y * y) * c / 2.0 - x * y) / s
    return mehler_prefactor(t) * h * np.exp(1j * phase)


def mehler_apply(f: Field, t: float) -> Field:
    """用 Mehler 核直接求积得到 e^{-itH} f，H = -Δ/2 + |x|²/2

    核在各坐标方向可分离，因此逐轴作用一维矩阵。

    Raises:
        ResolutionException: |sin t| < h²（t 接近 π 的整数倍，核无法在网格上表示）
    """
    grid = f.grid
    if abs(math.sin(t)) < grid.h ** 2:
        raise ResolutionException(f"|sin t|={abs(math.sin(t)):.3e} < h²={grid.h ** 2:.3e}，Mehler 核无法分辨")
    kernel = mehler_matrix(grid.axis(), t, grid.h)
    values = f.values
    for axis in range(grid.d):
        values = np.moveaxis(np.tensordot(kernel, values, axes=([1], [axis])), 0, axis)
    return f.with_values(values)
