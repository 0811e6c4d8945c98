# 谱方法真值模块（一维 Dirichlet 有限差分哈密顿量的本征分解）
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, eig_banded, eigh_tridiagonal

from .grid import Field, GridSpec
from ..potential.potential import Potential
from ..utils.exceptions import DomainException, EigensolveException, NonFiniteException
from ..utils.logger import lab_logger

SPECTRAL_MAX_N = 4096
_CACHE_SIZE = 4


@dataclass
class SpectralBasis:
    """H_h 的本征值与正交本征向量（按列）"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    grid: GridSpec
    order: int

    def propagate(self, values: np.ndarray, t: float) -> np.ndarray:
        coeffs = self.eigenvectors.T @ values
        return self.eigenvectors @ (np.exp(-1j * t * self.eigenvalues) * coeffs)


class _BasisCache:
    """按 (位势, 网格, 差分阶) 缓存本征分解"""

    def __init__(self):
        self._entries: "OrderedDict[Tuple, SpectralBasis]" = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            basis = self._entries.get(key)
            if basis is not None:
                self._entries.move_to_end(key)
            return basis

    def put(self, key, basis: SpectralBasis):
        with self._lock:
            self._entries[key] = basis
            while len(self._entries) > _CACHE_SIZE:
                self._entries.popitem(last=False)

    def clear(self):
        with self._lock:
            self._entries.clear()


basis_cache = _BasisCache()


def _check_grid(grid: GridSpec) -> None:
    if grid.d != 1:
        raise DomainException(f"谱方法真值只支持一维，实际 d={grid.d}")
    if grid.n > SPECTRAL_MAX_N:
        raise DomainException(f"谱方法真值要求 n ≤ {SPECTRAL_MAX_N}，实际 n={grid.n}")


def potential_on_grid(p: Potential, grid: GridSpec) -> np.ndarray:
    values = p.evaluate(grid.points())
    if not np.all(np.isfinite(values)):
        raise NonFiniteException(f"位势 {p.name} 在网格上的取值")
    return values


def hamiltonian_bands(p: Potential, grid: GridSpec, order: int = 2):
    """H_h = -Δ_h/2 + V 的对角与次对角带

    二阶：-½(f_{i-1} - 2f_i + f_{i+1})/h²；
    四阶：-½(-f_{i-2} + 16f_{i-1} - 30f_i + 16f_{i+1} - f_{i+2})/(12h²)。
    盒子外取 0（Dirichlet）。
    """
    _check_grid(grid)
    n, h2 = grid.n, grid.h ** 2
    v = potential_on_grid(p, grid)
    if order == 2:
        return [v + 1.0 / h2, np.full(n - 1, -0.5 / h2)]
    if order == 4:
        return [v + 1.25 / h2, np.full(n - 1, -2.0 / (3.0 * h2)), np.full(n - 2, 1.0 / (24.0 * h2))]
    raise DomainException(f"差分阶只能是 2 或 4，实际: {order}")


def spectral_basis(p: Potential, grid: GridSpec, order: int = 2) -> SpectralBasis:
    """本征分解（带缓存）

    Raises:
        EigensolveException: 本征求解失败
    """
    key = (p.cache_key(), grid, order)
    basis = basis_cache.get(key)
    if basis is not None:
        return basis
    bands = hamiltonian_bands(p, grid, order)
    try:
        if order == 2:
            w, vecs = eigh_tridiagonal(bands[0], bands[1])
        else:
            a_band = np.zeros((3, grid.n))
            a_band[0] = bands[0]
            a_band[1, :-1] = bands[1]
            a_band[2, :-2] = bands[2]
            w, vecs = eig_banded(a_band, lower=True)
    except (LinAlgError, ValueError) as e:
        raise EigensolveException(f"本征分解失败: {e}") from e
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(vecs))):
        raise EigensolveException("本征分解结果含非有限值")
    basis = SpectralBasis(eigenvalues=w, eigenvectors=vecs, grid=grid, order=order)
    basis_cache.put(key, basis)
    lab_logger.log_info(f"谱分解 {p.name} n={grid.n} 阶={order}，最低本征值 {w[0]:.12g}")
    return basis


def spectral_propagate(p: Potential, f: Field, t: float, order: int = 2) -> Field:
    """e^{-itH_h} f：离散内积下精确幺正，满足群性质"""
    basis = spectral_basis(p, f.grid, order)
    return f.with_values(basis.propagate(f.values, t))


def apply_hamiltonian(p: Potential, f: Field, order: int = 2) -> np.ndarray:
    """H_h f（不经本征分解，直接用带状矩阵作用）"""
    bands = hamiltonian_bands(p, f.grid, order)
    values = f.values
    out = bands[0] * values
    for offset, band in enumerate(bands[1:], start=1):
        out[:-offset] += band * values[offset:]
        out[offset:] += band * values[:-offset]
    return out


def q_form(p: Potential, f: Field) -> float:
    """离散二次型 ½‖∇_h f‖² + ‖V^{1/2} f‖²（前向差分，两端补 0）

    对二阶格式恒等于 ⟨f, H_h f⟩。
    """
    _check_grid(f.grid)
    h = f.grid.h
    padded = np.concatenate([[0.0], f.values, [0.0]])
    diff = np.diff(padded) / h
    v = potential_on_grid(p, f.grid)
    return float(0.5 * h * np.sum(np.abs(diff) ** 2) + h * np.sum(v * np.abs(f.values) ** 2))


def q_norm(p: Potential, f: Field) -> float:
    """Q(H) 范数 (‖∇f‖² + ‖V^{1/2} f‖²)^{1/2}，梯度用谱导数（任意维）"""
    v = p.evaluate(f.grid.points())
    potential_part = np.sum(v * np.abs(f.values) ** 2) * f.grid.cell_volume
    return float(np.sqrt(f.kinetic() + potential_part))
