# 自由传播模块
import numpy as np

from .grid import Field


def free_multiplier(field: Field, t: float) -> np.ndarray:
    """Fourier 乘子 exp(-it|ξ|²/2)"""
    return np.exp(-0.5j * t * field.grid.k2())


def free_propagate(f: Field, t: float) -> Field:
    """e^{itΔ/2} f：在周期盒子上精确（到舍入误差）的自由演化

    单位模乘子保证离散 L² 范数不变，且满足群性质。
    """
    if t == 0:
        return f.copy()
    return f.with_values(np.fft.ifftn(free_multiplier(f, t) * np.fft.fftn(f.values)))
