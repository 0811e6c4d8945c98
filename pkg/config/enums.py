# 枚举定义文件
from enum import Enum


class PotentialName(Enum):
    """内置位势枚举"""
    ZERO = "零位势"
    HARMONIC = "谐振子 |x|²/2"
    ISOTROPIC_QUADRATIC = "各向同性二次 δ|x|²"
    ANISOTROPIC_QUADRATIC = "各向异性二次 Σ c_i x_i²"
    PERTURBED_QUADRATIC = "扰动二次 δ|x|² + ε sin²(k·x)"


class FieldPreset(Enum):
    """初值场预设枚举"""
    GAUSSIAN = "高斯波包"
    BUMP = "紧支光滑鼓包"
    HERMITE_GROUND = "谐振子基态"
    SOLITON = "质量临界孤子"
    W_PROFILE = "截断的基态 W"


class Subcommand(Enum):
    """命令行子命令枚举（值为命令行上的写法）"""
    VERIFY_POTENTIAL = "verify-potential"
    CLASSICAL = "classical"
    PROPAGATE = "propagate"
    NLS = "nls"
    EXPERIMENT = "experiment"


class ClassicalOperation(Enum):
    """经典力学子命令的操作"""
    FLOW = "flow"
    BVP = "bvp"
    ACTION = "action"
    FOCAL = "focal"
    STRAIGHT_LINE = "straight-line"


class PropagateOperation(Enum):
    """线性传播子命令的操作"""
    FREE = "free"
    MEHLER = "mehler"
    FUJIWARA = "fujiwara"
    SPECTRAL = "spectral"


class NLSOperation(Enum):
    """非线性演化子命令的操作"""
    EVOLVE = "evolve"
    OBSERVABLES = "observables"
    GROUND_STATE = "ground-state"


class ExperimentOperation(Enum):
    """实验子命令的操作"""
    STRONG_CONVERGENCE = "strong-convergence"
    SCALING_LIMIT = "scaling-limit"
    APPROX_SOLUTION = "approx-solution"
    DISPERSIVE = "dispersive"
    THRESHOLD_SWEEP = "threshold-sweep"


class FrameType(Enum):
    """增广框架类型"""
    TYPE_1 = "类型 1：N ≡ 1"
    TYPE_2A = "类型 2a：N → ∞，r∞ > 0，N′ ≡ 1"
    TYPE_2B = "类型 2b：N → ∞，r∞ = 0，N^{1/2} ≤ N′ ≤ N"


class ResolutionPolicy(Enum):
    """核表分辨率不足时的处理策略"""
    STRICT = "报错"
    MASK = "屏蔽超出奈奎斯特频率的点对"


class EvaluationMethod(Enum):
    """缩放实验的计算方式"""
    RESCALED = "在缩放坐标中计算（精确共轭）"
    PHYSICAL = "在物理网格上重采样计算"
