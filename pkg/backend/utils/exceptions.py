# 自定义异常定义（用于更清晰的错误信息，并携带命令行退出码）
from __future__ import annotations


class LabException(Exception):
    """实验室基础异常。"""

    exit_code: int = 1


class ConfigException(LabException):
    """配置非法异常（格式错误、缺少字段、未知名称）。"""

    exit_code = 2


class PreconditionException(LabException):
    """调用前置条件不满足。"""

    exit_code = 3


class FocalTimeException(PreconditionException):
    """时间超出焦点界（或 t = 0）。"""

    def __init__(self, t: float, bound: float):
        super().__init__(f"时间 |t|={abs(t):.6g} 不在 (0, {bound:.6g}] 内，超出焦点界")
        self.t = t
        self.bound = bound


class ResolutionException(PreconditionException):
    """网格分辨率不足以表示振荡或集中态。"""


class BoundaryMassException(PreconditionException):
    """场的质量触及计算区域边界。"""

    def __init__(self, fraction: float, tolerance: float, where: str = ""):
        where_text = f"（{where}）" if where else ""
        super().__init__(f"边界质量占比 {fraction:.3e} 超过容差 {tolerance:.1e}{where_text}")
        self.fraction = fraction
        self.tolerance = tolerance


class DomainException(PreconditionException):
    """维数、形状或参数域不匹配。"""


class NumericalException(LabException):
    """数值失败。"""

    exit_code = 4


class NonFiniteException(NumericalException):
    """出现 NaN 或 Inf。"""

    def __init__(self, what: str):
        super().__init__(f"出现非有限数值: {what}")
        self.what = what


class ConvergenceException(NumericalException):
    """Newton 打靶不收敛。"""

    def __init__(self, iterations: int, residual: float):
        super().__init__(f"打靶法 {iterations} 次迭代后未收敛，残差 {residual:.3e}")
        self.iterations = iterations
        self.residual = residual


class EigensolveException(NumericalException):
    """本征分解失败。"""
