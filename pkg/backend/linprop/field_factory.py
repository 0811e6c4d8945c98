# 初值场工厂模块
from typing import Any, Dict, Optional
import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import numpy as np

from backend.linprop.grid import Field, GridSpec
from backend.utils.exceptions import ConfigException, DomainException
from config.enums import FieldPreset

# 质量临界孤子 Q(x) = 3^{1/4} sech^{1/2}(2√2 x)，满足 Q''/2 + Q^5 = Q
SOLITON_AMPLITUDE = 3.0 ** 0.25
SOLITON_RATE = 2.0 * np.sqrt(2.0)


def w_profile(r2: np.ndarray, d: int) -> np.ndarray:
    """W(x) = (1 + 2|x|²/(d(d-2)))^{-(d-2)/2}，满足 ΔW/2 + W^{(d+2)/(d-2)} = 0"""
    if d < 3:
        raise DomainException(f"基态 W 只在 d ≥ 3 时定义，实际 d={d}")
    a = 2.0 / (d * (d - 2))
    return (1.0 + a * r2) ** (-(d - 2) / 2.0)


def smooth_step(s: np.ndarray) -> np.ndarray:
    """C^∞ 过渡函数：s ≤ 0 时为 0，s ≥ 1 时为 1"""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


def bump_cutoff(r: np.ndarray, inner: float = 1.0, outer: float = 2.0) -> np.ndarray:
    """径向截断 χ：|x| ≤ inner 时为 1，|x| ≥ outer 时为 0"""
    return 1.0 - smooth_step((np.asarray(r) - inner) / (outer - inner))


class FieldFactory:
    """初值场工厂类

    根据预设枚举在给定网格上生成初值
    """

    @staticmethod
    def create_field(grid: GridSpec, preset: FieldPreset, params: Optional[Dict[str, Any]] = None) -> Field:
        """创建初值场

        Args:
            grid: 网格
            preset: 预设
            params: 预设参数
                GAUSSIAN: amplitude, width, center, momentum
                BUMP: amplitude, radius, center
                HERMITE_GROUND: 无
                SOLITON: scale, center（仅一维）
                W_PROFILE: amplitude, cutoff（仅三维及以上）

        Returns:
            Field
        """
        params = dict(params or {})
        try:
            center = np.broadcast_to(np.asarray(params.get("center", 0.0), dtype=float), (grid.d,))
        except ValueError:
            raise ConfigException(f"'field.params.center' 的长度必须为 {grid.d}")
        coords = grid.coordinates()
        shifted2 = sum((c - x0) ** 2 for c, x0 in zip(coords, center))

        if preset == FieldPreset.GAUSSIAN:
            amplitude = float(params.get("amplitude", 1.0))
            width = float(params.get("width", 1.0))
            momentum = np.broadcast_to(np.asarray(params.get("momentum", 0.0), dtype=float), (grid.d,))
            phase = sum(k * c for k, c in zip(momentum, coords))
            values = amplitude * np.exp(-shifted2 / (2.0 * width ** 2)) * np.exp(1j * phase)
        elif preset == FieldPreset.BUMP:
            amplitude = float(params.get("amplitude", 1.0))
            radius = float(params.get("radius", 2.0))
            s = shifted2 / radius ** 2
            with np.errstate(divide="ignore"):
                values = np.where(s < 1.0, amplitude * np.e * np.exp(-1.0 / np.where(s < 1.0, 1.0 - s, 1.0)), 0.0)
        elif preset == FieldPreset.HERMITE_GROUND:
            values = np.pi ** (-grid.d / 4.0) * np.exp(-grid.radius2() / 2.0)
        elif preset == FieldPreset.SOLITON:
            if grid.d != 1:
                raise ConfigException("SOLITON 预设只用于一维")
            scale = float(params.get("scale", 1.0))
            values = scale * soliton_profile(coords[0] - center[0])
        elif preset == FieldPreset.W_PROFILE:
            amplitude = float(params.get("amplitude", 1.0))
            cutoff = float(params.get("cutoff", grid.L / 2.0))
            try:
                profile = w_profile(shifted2, grid.d)
            except DomainException as e:
                raise ConfigException(str(e)) from e
            values = amplitude * profile * bump_cutoff(np.sqrt(shifted2) / cutoff, 0.5, 1.0)
        else:
            raise ConfigException(f"未知的初值预设: {preset}")
        return Field(grid, values)


def soliton_profile(x: np.ndarray) -> np.ndarray:
    """一维五次方程 i u_t = -u''/2 - |u|⁴u 的孤子剖面 Q"""
    return SOLITON_AMPLITUDE / np.sqrt(np.cosh(SOLITON_RATE * x))
