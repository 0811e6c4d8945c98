# 集中初值的缩放极限实验模块
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .frames import FrameParams, inverse_rescale_G, rescale_G
from ..linprop.grid import Field, GridSpec
from ..linprop.spectral import spectral_propagate
from ..nls.problem import NLSProblem, default_power
from ..nls.split_step import RECORD_EVERY, split_step_evolve
from ..potential.potential import Potential, ZeroPotential
from ..utils.exceptions import DomainException
from ..utils.logger import lab_logger
from ..utils.worker_pool import worker_pool
from config.enums import EvaluationMethod

EXPERIMENT_NAME = "scaling-limit"


@dataclass
class ScalingCell:
    lam: float
    t: float
    modulation: float
    error: float
    relative_error: float

    def row(self):
        return [self.lam, self.t, self.modulation, self.error, self.relative_error]


@dataclass
class ScalingLimitReport:
    mu: int
    power: float
    exponent: float
    sobolev_index: float
    window: float
    method: EvaluationMethod
    cells: List[ScalingCell] = field(default_factory=list)

    COLUMNS = ["lambda", "t", "modulation", "error", "relative_error"]

    @property
    def errors(self) -> List[float]:
        return [cell.error for cell in self.cells]

    def is_decreasing(self) -> bool:
        errors = self.errors
        return all(b <= a for a, b in zip(errors, errors[1:]))

    def rows(self):
        return [cell.row() for cell in self.cells]

    def to_dict(self):
        return {
            "experiment": EXPERIMENT_NAME,
            "mu": self.mu,
            "power": self.power,
            "exponent": self.exponent,
            "sobolev_index": self.sobolev_index,
            "window": self.window,
            "method": self.method.name,
            "lambdas": [c.lam for c in self.cells],
            "errors": self.errors,
            "decreasing": self.is_decreasing(),
        }


def scaling_limit_experiment(p: Potential, phi: Field, lambdas: Sequence[float], mu: int = 0,
                             power: Optional[float] = None, x0: Optional[Sequence[float]] = None,
                             window: float = 1.0, dt: float = 1e-3, order: int = 4,
                             method: EvaluationMethod = EvaluationMethod.RESCALED,
                             physical_grid: Optional[GridSpec] = None,
                             record_every: int = RECORD_EVERY) -> ScalingLimitReport:
    """比较集中初值 u₀^λ = λ^{-α}φ((x - x₀)/λ) 的完整演化与无位势演化

    α = 2/p，使 d = 1、p = 4 的测试问题同样具有尺度不变性（能量临界时 α = (d-2)/2）。
    在 t = window·λ² 时刻，把 u^λ 拉回缩放坐标得到 w，与 e^{-it V(x₀)} v 比较，
    误差取临界 Sobolev 范数 Ḣ^{s_c}，s_c = d/2 - 2/p（缩放算子在此范数下等距）。
    μ = 0 的一维情形用谱方法真值传播，否则用分裂步方法（两边步长相同）。

    Args:
        p: 位势
        phi: 缩放坐标中的剖面
        lambdas: 尺度 λ，要求 1/λ 为 2 的幂
        mu: 非线性符号
        power: 非线性指数，缺省为 default_power(d)
        x0: 集中点，缺省为原点
        window: 时间窗常数 c（t = cλ²）
        method: RESCALED 在缩放坐标中计算；PHYSICAL 在 physical_grid 上直接演化

    Raises:
        DomainException: 参数不合法
        ResolutionException: 物理网格放不下或分辨不了集中态
    """
    d = phi.grid.d
    power = default_power(d) if power is None else float(power)
    exponent = 2.0 / power
    s_c = d / 2.0 - exponent
    x0 = np.zeros(d) if x0 is None else np.broadcast_to(np.asarray(x0, dtype=float), (d,))
    if not window > 0:
        raise DomainException(f"时间窗常数必须为正，实际: {window}")
    if method == EvaluationMethod.PHYSICAL and physical_grid is None:
        raise DomainException("PHYSICAL 方式需要给出物理网格")
    linear_oracle = mu == 0 and d == 1

    def evolve(potential: Potential, u0: Field, T: float, step: float) -> Field:
        if linear_oracle:
            return spectral_propagate(potential, u0, T, order=order)
        prob = NLSProblem(potential, mu, u0.grid, power)
        return split_step_evolve(prob, u0, T, step, record_every=record_every).field

    v = evolve(ZeroPotential(), phi, window, dt)

    def run_cell(lam: float) -> ScalingCell:
        frame = FrameParams(t_n=0.0, x_n=tuple(x0), N=1.0 / lam)
        v_lambda = frame.rescaled_potential(p)
        theta = window * float(v_lambda.evaluate(np.zeros(d)))
        if method == EvaluationMethod.RESCALED:
            w = evolve(v_lambda, phi, window, dt)
        else:
            u0 = rescale_G(frame, phi, physical_grid, exponent=exponent)
            u = evolve(p, u0, window * lam ** 2, dt * lam ** 2)
            w = inverse_rescale_G(frame, u, phi.grid, exponent=exponent)
        expected = v.with_values(np.exp(-1j * theta) * v.values)
        error = (w - expected).hdot_norm(s_c)
        scale = expected.hdot_norm(s_c)
        cell = ScalingCell(lam=float(lam), t=window * lam ** 2, modulation=theta, error=error,
                           relative_error=error / scale if scale > 0 else math.inf)
        lab_logger.log_experiment_cell(EXPERIMENT_NAME, f"λ={lam:g}", {"error": error})
        return cell

    report = ScalingLimitReport(mu=mu, power=power, exponent=exponent, sobolev_index=s_c,
                                window=window, method=method)
    report.cells = worker_pool.map(run_cell, list(lambdas))
    return report
