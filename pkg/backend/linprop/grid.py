# 网格与场模块
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import List

import numpy as np

from ..utils.exceptions import BoundaryMassException, DomainException
from ..utils.output_writer import write_csv

BOUNDARY_TOL = 1e-8
# 边界层：每一维两端各 n/16 个格点
BOUNDARY_LAYER_FRACTION = 1.0 / 16.0
_HEADER = struct.Struct("<iid")


@dataclass(frozen=True)
class GridSpec:
    """[-L, L)^d 上每维 n 个点的均匀网格，x_j = -L + j h，h = 2L/n"""
    d: int
    L: float
    n: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainException(f"网格维数必须是 1、2 或 3，实际: {self.d}")
        if not self.L > 0:
            raise DomainException(f"网格半宽必须为正，实际: {self.L}")
        if self.n < 8 or self.n & (self.n - 1) != 0:
            raise DomainException(f"每维点数必须是不小于 8 的 2 的幂，实际: {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    def frequencies(self) -> np.ndarray:
        """一维角波数 k = 2π fftfreq(n, h)"""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.axis()] * self.d), indexing="ij")

    def points(self) -> np.ndarray:
        """形状 (n,)*d + (d,) 的坐标点"""
        return np.stack(self.coordinates(), axis=-1)

    def radius2(self) -> np.ndarray:
        return sum(c * c for c in self.coordinates())

    def wavenumbers(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.frequencies()] * self.d), indexing="ij")

    def k2(self) -> np.ndarray:
        return sum(k * k for k in self.wavenumbers())

    def content_hash(self) -> str:
        return hashlib.sha256(f"{self.d}:{self.L!r}:{self.n}".encode()).hexdigest()[:16]

    def contains(self, point: np.ndarray, margin: float = 0.0) -> bool:
        point = np.atleast_1d(point)
        return bool(np.all(point - margin >= -self.L) and np.all(point + margin < self.L))

    def boundary_mask(self) -> np.ndarray:
        width = max(1, int(self.n * BOUNDARY_LAYER_FRACTION))
        mask_1d = np.zeros(self.n, dtype=bool)
        mask_1d[:width] = True
        mask_1d[-width:] = True
        masks = np.meshgrid(*([mask_1d] * self.d), indexing="ij")
        result = masks[0]
        for m in masks[1:]:
            result = result | m
        return result

    def to_dict(self):
        return {"d": self.d, "L": self.L, "n": self.n, "h": self.h}


class Field:
    """网格上的复值场"""

    def __init__(self, grid: GridSpec, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.shape:
            raise DomainException(f"场的形状 {values.shape} 与网格 {grid.shape} 不一致")
        self.grid = grid
        self.values = values

    # 范数与内积

    def mass(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume)

    def norm_l2(self) -> float:
        return float(np.sqrt(self.mass()))

    def norm_l1(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.grid.cell_volume)

    def norm_sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def norm_lq(self, q: float) -> float:
        return float((np.sum(np.abs(self.values) ** q) * self.grid.cell_volume) ** (1.0 / q))

    def inner(self, other: 'Field') -> complex:
        """⟨self, other⟩ = Σ conj(f) g h^d"""
        return complex(np.vdot(self.values, other.values) * self.grid.cell_volume)

    # 谱导数

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    def gradient(self) -> List[np.ndarray]:
        f_hat = self.spectrum()
        return [np.fft.ifftn(1j * k * f_hat) for k in self.grid.wavenumbers()]

    def laplacian(self) -> np.ndarray:
        return np.fft.ifftn(-self.grid.k2() * self.spectrum())

    def kinetic(self) -> float:
        """‖∇f‖² （谱方法，由 Parseval 计算）"""
        f_hat = self.spectrum()
        return float(np.sum(self.grid.k2() * np.abs(f_hat) ** 2)
                     * self.grid.cell_volume / np.prod(self.grid.shape))

    def hdot_norm(self, s: float) -> float:
        """齐次 Sobolev 范数 ‖|∇|^s f‖₂"""
        if s == 0:
            return self.norm_l2()
        f_hat = self.spectrum()
        k2 = self.grid.k2()
        weight = np.where(k2 > 0, k2 ** s, 0.0)
        return float(np.sqrt(np.sum(weight * np.abs(f_hat) ** 2)
                             * self.grid.cell_volume / np.prod(self.grid.shape)))

    def sigma_norm(self) -> float:
        """‖∇f‖₂ + ‖x f‖₂"""
        weighted = np.sum(self.grid.radius2() * np.abs(self.values) ** 2) * self.grid.cell_volume
        return float(np.sqrt(self.kinetic()) + np.sqrt(weighted))

    # 边界

    def boundary_fraction(self) -> float:
        total = np.sum(np.abs(self.values) ** 2)
        if total == 0:
            return 0.0
        return float(np.sum(np.abs(self.values[self.grid.boundary_mask()]) ** 2) / total)

    def check_boundary(self, tol: float = BOUNDARY_TOL, where: str = "") -> float:
        fraction = self.boundary_fraction()
        if fraction > tol:
            raise BoundaryMassException(fraction, tol, where)
        return fraction

    # 其他

    def copy(self) -> 'Field':
        return Field(self.grid, self.values.copy())

    def with_values(self, values: np.ndarray) -> 'Field':
        return Field(self.grid, values)

    def __sub__(self, other: 'Field') -> 'Field':
        if other.grid != self.grid:
            raise DomainException("两个场不在同一网格上")
        return Field(self.grid, self.values - other.values)

    def relative_l2_error(self, reference: 'Field') -> float:
        return (self - reference).norm_l2() / reference.norm_l2()

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    # 输入输出

    def save_binary(self, path: str) -> str:
        """小端二进制：头部 (d, n, L)，随后按行优先交错存放实部与虚部"""
        payload = np.empty(self.values.shape + (2,), dtype="<f8")
        payload[..., 0] = self.values.real
        payload[..., 1] = self.values.imag
        with open(path, "wb") as f:
            f.write(_HEADER.pack(self.grid.d, self.grid.n, float(self.grid.L)))
            f.write(payload.tobytes(order="C"))
        return path

    @classmethod
    def load_binary(cls, path: str) -> 'Field':
        with open(path, "rb") as f:
            d, n, L = _HEADER.unpack(f.read(_HEADER.size))
            grid = GridSpec(d, L, n)
            payload = np.frombuffer(f.read(), dtype="<f8")
        if payload.size != 2 * n ** d:
            raise DomainException(f"二进制场文件长度不符: {path}")
        payload = payload.reshape(grid.shape + (2,))
        return cls(grid, payload[..., 0] + 1j * payload[..., 1])

    def write_csv(self, path: str) -> str:
        """一维场导出为 CSV（x, re, im, abs2）"""
        if self.grid.d != 1:
            raise DomainException("CSV 导出只支持一维场，高维请使用二进制格式")
        rows = zip(self.grid.axis(), self.values.real, self.values.imag, np.abs(self.values) ** 2)
        return write_csv(path, ["x", "re", "im", "abs2"], rows)

    def __repr__(self) -> str:
        return f"Field(d={self.grid.d}, n={self.grid.n}, L={self.grid.L}, mass={self.mass():.6g})"
