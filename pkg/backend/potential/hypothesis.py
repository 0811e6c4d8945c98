# 位势假设检验模块
from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from scipy.stats import qmc

from .potential import Potential, finite_difference_gradient, finite_difference_hessian
from ..utils.exceptions import DomainException, NonFiniteException
from ..utils.logger import lab_logger
from ..utils.worker_pool import worker_pool

# 检验的数值容差
HYPOTHESIS_TOL = 1e-12
CHUNK_SIZE = 4096


@dataclass(frozen=True)
class Box:
    """轴对齐盒子 [lo, hi]"""
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def symmetric(cls, half_width: float, d: int) -> 'Box':
        return cls(np.full(d, -float(half_width)), np.full(d, float(half_width)))

    @classmethod
    def coerce(cls, box: Union['Box', Sequence[Any]], d: Optional[int] = None) -> 'Box':
        """接受 Box、(lo, hi) 或 [[lo...],[hi...]]"""
        if isinstance(box, Box):
            return box
        lo, hi = box
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if d is not None:
            lo = np.broadcast_to(lo, (d,)).copy()
            hi = np.broadcast_to(hi, (d,)).copy()
        return cls(lo, hi)

    def __post_init__(self):
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise DomainException(f"盒子边界非法: lo={self.lo.tolist()}, hi={self.hi.tolist()}")

    @property
    def dim(self) -> int:
        return int(self.lo.size)

    def scale(self, unit: np.ndarray) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * unit


@dataclass
class HypothesisReport:
    """位势假设（非负、二阶以上导数有界、强制性）的采样检验报告"""
    potential: str
    d: int
    samples: int
    delta_used: float
    min_value: float
    max_hessian_norm: float
    hess_bound: float
    min_coercivity_margin: float
    max_upper_ratio: float
    fd_gradient_error: float
    fd_hessian_error: float
    pass_v1: bool
    pass_v2: bool
    pass_v3: bool
    pass_upper: bool
    unverified_beyond_k2: bool

    @property
    def passed(self) -> bool:
        return self.pass_v1 and self.pass_v2 and self.pass_v3

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result["passed"] = self.passed
        return result


def sample_box(box: Box, samples: int, seed: int = 0) -> np.ndarray:
    """盒子中的确定性低差异采样（加扰 Halton 序列）"""
    sampler = qmc.Halton(d=box.dim, scramble=True, seed=seed)
    return box.scale(sampler.random(samples))


def _chunk_stats(p: Potential, x: np.ndarray, delta: float) -> Dict[str, float]:
    values = p.evaluate(x)
    hess = p.hessian(x)
    grad = p.gradient(x)
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(hess)) and np.all(np.isfinite(grad))):
        raise NonFiniteException(f"位势 {p.name} 在采样点上的取值或导数")
    r2 = np.sum(x * x, axis=-1)
    hess_norm = np.linalg.norm(hess, ord=2, axis=(-2, -1))
    upper = values * p.upper_delta / (1.0 + r2) if np.isfinite(p.upper_delta) else np.zeros_like(values)

    grad_fd = finite_difference_gradient(p.evaluate, x)
    hess_fd = finite_difference_hessian(p.gradient, x)
    grad_scale = 1.0 + np.linalg.norm(grad, axis=-1)
    hess_scale = 1.0 + hess_norm
    return {
        "min_value": float(values.min()),
        "max_hessian_norm": float(hess_norm.max()),
        "min_margin": float(((values - delta * r2) / (1.0 + r2)).min()),
        "max_upper": float(upper.max()),
        "fd_grad": float((np.linalg.norm(grad - grad_fd, axis=-1) / grad_scale).max()),
        "fd_hess": float((np.linalg.norm(hess - hess_fd, ord=2, axis=(-2, -1)) / hess_scale).max()),
    }


def verify_hypotheses(p: Potential, box: Union[Box, Sequence[Any]], samples: int,
                      delta: Optional[float] = None, seed: int = 0) -> HypothesisReport:
    """在盒子中的采样点上检验位势假设

    Args:
        p: 位势
        box: 采样盒子
        samples: 采样点数
        delta: 强制性常数，缺省使用位势自身声明的 δ
        seed: 采样种子

    Returns:
        HypothesisReport

    Raises:
        DomainException: 盒子维数与位势不符或采样数非正
        NonFiniteException: 位势或导数出现非有限值
    """
    box = Box.coerce(box)
    p.check_dim(box.dim)
    if samples <= 0:
        raise DomainException(f"采样数必须为正，实际: {samples}")
    delta_used = p.delta if delta is None else float(delta)

    points = sample_box(box, samples, seed)
    chunks = [points[i:i + CHUNK_SIZE] for i in range(0, samples, CHUNK_SIZE)]
    stats = worker_pool.map(lambda chunk: _chunk_stats(p, chunk, delta_used), chunks)

    min_value = min(s["min_value"] for s in stats)
    max_hess = max(s["max_hessian_norm"] for s in stats)
    min_margin = min(s["min_margin"] for s in stats)
    max_upper = max(s["max_upper"] for s in stats)
    hess_bound = p.hessian_bound(box.dim)

    report = HypothesisReport(
        potential=p.name,
        d=box.dim,
        samples=samples,
        delta_used=delta_used,
        min_value=min_value,
        max_hessian_norm=max_hess,
        hess_bound=hess_bound,
        min_coercivity_margin=min_margin,
        max_upper_ratio=max_upper,
        fd_gradient_error=max(s["fd_grad"] for s in stats),
        fd_hessian_error=max(s["fd_hess"] for s in stats),
        pass_v1=min_value >= -HYPOTHESIS_TOL,
        pass_v2=bool(np.isfinite(hess_bound)) and max_hess <= hess_bound * (1.0 + HYPOTHESIS_TOL) + HYPOTHESIS_TOL,
        pass_v3=delta_used > 0 and min_margin >= -HYPOTHESIS_TOL,
        pass_upper=max_upper <= 1.0 + HYPOTHESIS_TOL,
        unverified_beyond_k2=p.verified_order is not None,
    )
    lab_logger.log_hypothesis_report(p.name, report.to_dict())
    return report
