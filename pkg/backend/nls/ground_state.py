# 基态 W 模块（d = 3）
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from ..linprop.field_factory import w_profile
from ..linprop.grid import Field, GridSpec
from ..utils.exceptions import DomainException
from ..utils.logger import lab_logger

# ‖∇W‖₂² = (3π²/4)(3/2)^{1/2}，E_Δ(W) = ‖∇W‖₂²/3
KINETIC_W_EXACT = 0.75 * math.pi ** 2 * math.sqrt(1.5)
ENERGY_W_EXACT = KINETIC_W_EXACT / 3.0

# 四阶中心差分 f'' ≈ (-f₋₂ + 16f₋₁ - 30f₀ + 16f₁ - f₂)/(12h²)
_STENCIL = (-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0)


@dataclass
class GroundState:
    """网格上的 W 以及由求积得到的 ‖∇W‖₂²、E_Δ(W) 与椭圆残差"""
    grid: GridSpec
    values: np.ndarray
    w_zero: float
    kinetic_W: float
    energy_W: float
    kinetic_box: float
    energy_box: float
    residual: float
    residual_radius: float

    def field(self) -> Field:
        return Field(self.grid, self.values)

    def to_dict(self):
        return {
            "grid": self.grid.to_dict(),
            "w_zero": self.w_zero,
            "kinetic_W": self.kinetic_W,
            "energy_W": self.energy_W,
            "kinetic_W_exact": KINETIC_W_EXACT,
            "energy_W_exact": ENERGY_W_EXACT,
            "kinetic_box": self.kinetic_box,
            "energy_box": self.energy_box,
            "residual": self.residual,
            "residual_radius": self.residual_radius,
        }


def radial_oracles():
    """径向积分得到全空间的 ‖∇W‖₂² 与 E_Δ(W)"""
    a = 2.0 / 3.0

    def kinetic_density(r):
        return 4.0 * math.pi * r * r * (a * r) ** 2 * (1.0 + a * r * r) ** -3

    def sextic_density(r):
        return 4.0 * math.pi * r * r * (1.0 + a * r * r) ** -3

    kinetic, _ = quad(kinetic_density, 0.0, math.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    sextic, _ = quad(sextic_density, 0.0, math.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    return kinetic, 0.5 * kinetic - sextic / 3.0


def elliptic_residual(values: np.ndarray, grid: GridSpec, radius: float) -> float:
    """max |½ΔW + W⁵| 在 |x| ≤ radius 的内点上（四阶差分，逐层计算）"""
    n, h = grid.n, grid.h
    axis = grid.axis()
    inv = 1.0 / (h * h)
    worst = 0.0
    inner = slice(2, n - 2)
    y2 = (axis[inner, None] ** 2 + axis[None, inner] ** 2)
    for i in range(2, n - 2):
        if axis[i] ** 2 > radius ** 2:
            continue
        window = [values[i + k - 2] for k in range(5)]
        center = window[2]
        lap = sum(c * w[inner, inner] for c, w in zip(_STENCIL, window))
        lap = lap + sum(c * center[2 + k - 2:n - 2 + k - 2, inner] for k, c in enumerate(_STENCIL))
        lap = lap + sum(c * center[inner, 2 + k - 2:n - 2 + k - 2] for k, c in enumerate(_STENCIL))
        lap = lap * inv
        w = center[inner, inner]
        residual = np.abs(0.5 * lap + w ** 5)
        mask = axis[i] ** 2 + y2 <= radius ** 2
        if np.any(mask):
            worst = max(worst, float(np.max(residual[mask])))
    return worst


def ground_state_W(grid: GridSpec, radius: Optional[float] = None) -> GroundState:
    """在三维网格上列表 W(x) = (1 + 2|x|²/3)^{-1/2}

    Args:
        grid: 三维网格
        radius: 计算椭圆残差的半径；缺省为 L/2

    Raises:
        DomainException: d ≠ 3，或半径超出可计算四阶差分的范围
    """
    if grid.d != 3:
        raise DomainException(f"基态 W 只在 d = 3 时计算，实际 d={grid.d}")
    radius = grid.L / 2.0 if radius is None else float(radius)
    if radius > grid.L - 3.0 * grid.h:
        raise DomainException(f"残差半径 {radius} 超出网格内部 {grid.L - 3.0 * grid.h}")

    axis = grid.axis()
    plane2 = axis[:, None] ** 2 + axis[None, :] ** 2
    values = np.empty(grid.shape)
    kinetic_sum = 0.0
    sextic_sum = 0.0
    for i, x0 in enumerate(axis):
        r2 = x0 * x0 + plane2
        slab = w_profile(r2, 3)
        values[i] = slab
        # |∇W|² = (2/3)² |x|² W⁶
        kinetic_sum += float(np.sum((4.0 / 9.0) * r2 * slab ** 6))
        sextic_sum += float(np.sum(slab ** 6))
    w_zero = float(values[(grid.n // 2,) * 3])
    kinetic_box = kinetic_sum * grid.cell_volume
    sextic_box = sextic_sum * grid.cell_volume
    energy_box = 0.5 * kinetic_box - sextic_box / 3.0

    kinetic_W, energy_W = radial_oracles()
    residual = elliptic_residual(values, grid, radius)
    lab_logger.log_info(
        f"基态 W: ‖∇W‖²={kinetic_W:.12g}（盒内 {kinetic_box:.8g}），E_Δ(W)={energy_W:.12g}，"
        f"|x|≤{radius} 上残差 {residual:.3e}")
    return GroundState(grid=grid, values=values, w_zero=w_zero, kinetic_W=kinetic_W,
                       energy_W=energy_W, kinetic_box=kinetic_box, energy_box=energy_box,
                       residual=residual, residual_radius=radius)
