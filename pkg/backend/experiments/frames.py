# 框架、缩放平移算子与截断算子模块
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..linprop.field_factory import bump_cutoff
from ..linprop.grid import Field, GridSpec
from ..linprop.spectral import q_norm
from ..potential.potential import Potential, RescaledPotential
from ..utils.exceptions import DomainException, ResolutionException
from config.enums import FrameType

# 重采样后的场在目标盒子外的质量占比上限
SUPPORT_TOL = 1e-10


def is_dyadic(value: float) -> bool:
    if value < 1:
        return False
    exponent = math.log2(value)
    return abs(exponent - round(exponent)) < 1e-12


@dataclass(frozen=True)
class FrameParams:
    """增广框架中的一项 (t_n, x_n, N_n, N_n′)"""
    t_n: float
    x_n: Tuple[float, ...]
    N: float
    N_prime: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x_n", tuple(float(v) for v in np.atleast_1d(self.x_n)))
        if not is_dyadic(self.N):
            raise DomainException(f"尺度 N 必须是 2 的非负整数次幂，实际: {self.N}")
        if self.N == 1:
            if self.N_prime != 1:
                raise DomainException(f"N = 1 时 N′ 必须为 1，实际: {self.N_prime}")
        elif self.N_prime != 1 and not (math.sqrt(self.N) - 1e-12 <= self.N_prime <= self.N + 1e-12):
            raise DomainException(f"N′ 必须为 1 或满足 N^{{1/2}} ≤ N′ ≤ N，实际 N={self.N}, N′={self.N_prime}")

    @property
    def d(self) -> int:
        return len(self.x_n)

    @property
    def frame_type(self) -> FrameType:
        if self.N == 1:
            return FrameType.TYPE_1
        if self.N_prime == 1:
            return FrameType.TYPE_2A
        return FrameType.TYPE_2B

    @property
    def cutoff_radius(self) -> float:
        """缩放坐标中截断的半径 N/N′"""
        return self.N / self.N_prime

    def ratio(self, p: Potential) -> float:
        """N^{-1} V(x_n)^{1/2}"""
        return float(np.sqrt(p.evaluate(np.asarray(self.x_n))) / self.N)

    def rescaled_potential(self, p: Potential) -> RescaledPotential:
        return RescaledPotential(p, np.asarray(self.x_n), self.N)

    def to_dict(self):
        return {"t_n": self.t_n, "x_n": list(self.x_n), "N": self.N, "N_prime": self.N_prime,
                "type": self.frame_type.name}


@dataclass
class FrameLimit:
    """R_∞、x_∞、t_∞、r_∞（用序列最后一项近似极限）"""
    R_inf: float
    x_inf: Tuple[float, ...]
    t_inf: float
    r_inf: float

    def to_dict(self):
        return {"R_inf": self.R_inf, "x_inf": list(self.x_inf), "t_inf": self.t_inf,
                "r_inf": self.r_inf}


def canonical_frames(p: Potential, scales: Sequence[float], c: float, t_inf: float,
                     d: int = 1) -> List[FrameParams]:
    """标准框架族：t_n = t_∞/N²，x_n = cN e₁

    c > 0 时 r_∞ > 0，取 N′ ≡ 1（类型 2a）；c = 0 时取 N′ = N^{1/2}（类型 2b）。
    """
    frames = []
    for N in scales:
        x_n = np.zeros(d)
        x_n[0] = c * N
        n_prime = 1.0 if c != 0 or N == 1 else math.sqrt(N)
        frames.append(FrameParams(t_n=t_inf / N ** 2, x_n=tuple(x_n), N=float(N), N_prime=n_prime))
    return frames


def frame_limit(p: Potential, frames: Sequence[FrameParams]) -> FrameLimit:
    """以同一框架自身作比较时 R_∞ = 1、x_∞ = 0，t_∞ = lim N² t_n，r_∞ = lim N^{-1}V(x_n)^{1/2}"""
    if not frames:
        raise DomainException("框架序列为空")
    last = frames[-1]
    return FrameLimit(R_inf=1.0, x_inf=(0.0,) * last.d, t_inf=last.N ** 2 * last.t_n,
                      r_inf=last.ratio(p))


def relative_frame_limit(p: Potential, frames_m: Sequence[FrameParams],
                         frames_n: Sequence[FrameParams]) -> FrameLimit:
    """两个等价框架之间的极限参数

    R_∞ = lim M/N，t_∞ = lim M²(t^M - t^N)，x_∞ = lim M(y_n - x_n)，r_∞ = lim M^{-1}V(x_n)^{1/2}
    """
    if len(frames_m) != len(frames_n) or not frames_m:
        raise DomainException("两个框架序列长度必须相同且非空")
    fm, fn = frames_m[-1], frames_n[-1]
    x_inf = tuple(fm.N * (b - a) for a, b in zip(fm.x_n, fn.x_n))
    return FrameLimit(R_inf=fm.N / fn.N, x_inf=x_inf, t_inf=fm.N ** 2 * (fm.t_n - fn.t_n),
                      r_inf=fm.ratio(p))


def _axis_interpolation(source: GridSpec, targets: np.ndarray) -> np.ndarray:
    """带限插值矩阵：把一维 DFT 系数映到目标点上的取值

    目标点落在源盒子外时对应行为零。
    """
    k = source.frequencies()
    rows = np.exp(1j * (targets[:, None] + source.L) * k[None, :]) / source.n
    inside = (targets >= -source.L) & (targets < source.L)
    rows[~inside] = 0.0
    return rows


def resample(f: Field, target: GridSpec, maps: Sequence[Tuple[float, float]]) -> np.ndarray:
    """带限（Fourier）插值，在 target 的第 i 轴坐标 x 处取 f 在 a_i x + b_i 的值

    逐轴作用，先做该轴的 FFT 再乘插值矩阵。
    """
    if target.d != f.grid.d:
        raise DomainException(f"源网格维数 {f.grid.d} 与目标网格维数 {target.d} 不一致")
    values = f.values
    axis = target.axis()
    for i, (a, b) in enumerate(maps):
        matrix = _axis_interpolation(f.grid, a * axis + b)
        coeffs = np.fft.fft(values, axis=i)
        values = np.moveaxis(np.tensordot(matrix, coeffs, axes=([1], [i])), 0, i)
    return values


def _check_support(f: Field, target: GridSpec, maps, what: str) -> None:
    # f 的质量在映射 y ↦ (y - b)/a 下落到目标盒子外的占比
    total = np.sum(np.abs(f.values) ** 2)
    if total == 0:
        return
    outside = np.zeros(f.grid.shape, dtype=bool)
    for i, (a, b) in enumerate(maps):
        image = (f.grid.coordinates()[i] - b) / a
        outside |= (image < -target.L) | (image >= target.L)
    fraction = float(np.sum(np.abs(f.values[outside]) ** 2) / total)
    if fraction > SUPPORT_TOL:
        raise ResolutionException(f"{what}: {fraction:.3e} 的质量落在目标盒子 [-{target.L}, {target.L}) 之外")


def rescale_G(frame: FrameParams, f: Field, target: GridSpec, exponent: Optional[float] = None) -> Field:
    """(G_n φ)(x) = N^α φ(N(x - x_n))，缺省 α = (d-2)/2

    Raises:
        ResolutionException: 目标网格放不下缩放后的支集，或步长不足以分辨 1/N 尺度
    """
    d = f.grid.d
    exponent = (d - 2) / 2.0 if exponent is None else exponent
    if frame.d != d:
        raise DomainException(f"框架维数 {frame.d} 与场维数 {d} 不一致")
    if target.h * frame.N > f.grid.h * (1.0 + 1e-12):
        raise ResolutionException(
            f"目标步长 {target.h:.4g} 分辨不了尺度 1/N = {1.0 / frame.N:.4g} 上的场"
            f"（需要 h ≤ {f.grid.h / frame.N:.4g}）")
    maps = [(frame.N, -frame.N * x0) for x0 in frame.x_n]
    _check_support(f, target, maps, "G_n 的支集")
    return Field(target, frame.N ** exponent * resample(f, target, maps))


def inverse_rescale_G(frame: FrameParams, g: Field, target: GridSpec, exponent: Optional[float] = None) -> Field:
    """(G_n^{-1} g)(y) = N^{-α} g(x_n + y/N)"""
    d = g.grid.d
    exponent = (d - 2) / 2.0 if exponent is None else exponent
    maps = [(1.0 / frame.N, x0) for x0 in frame.x_n]
    _check_support(g, target, maps, "G_n^{-1} 的支集")
    return Field(target, frame.N ** -exponent * resample(g, target, maps))


def cutoff_S(frame: FrameParams, f: Field) -> Field:
    """S_n f = χ(N′ y / N) f（类型 1 为恒等）；χ 在 |y| ≤ 1 上为 1，在 |y| ≥ 2 上为 0"""
    if frame.frame_type == FrameType.TYPE_1:
        return f.copy()
    r = np.sqrt(f.grid.radius2()) / frame.cutoff_radius
    return f.with_values(bump_cutoff(r, 1.0, 2.0) * f.values)


def littlewood_paley(f: Field, M: float) -> Field:
    """P_{≤M} f：Fourier 乘子 χ(|ξ|/M)，在 |ξ| ≤ M 上为 1，在 |ξ| ≥ 2M 上为 0"""
    if not M > 0:
        raise DomainException(f"频率截断必须为正，实际: {M}")
    multiplier = bump_cutoff(np.sqrt(f.grid.k2()) / M, 1.0, 2.0)
    return f.with_values(np.fft.ifftn(multiplier * f.spectrum()))


def frame_q_norm(p: Potential, frame: FrameParams, phi: Field) -> float:
    """‖G_n S_n φ‖_{Q(H)}，在缩放坐标中计算：‖∇S_nφ‖² + ‖V_N^{1/2} S_nφ‖²

    G_n 取 (d-2)/2 指数时是 Ḣ¹ 等距，且 ∫V|G_n f|² = ∫V_N|f|²，因此无需重采样。
    """
    return q_norm(frame.rescaled_potential(p), cutoff_S(frame, phi))
