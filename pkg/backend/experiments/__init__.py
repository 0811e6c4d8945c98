# 极限行为实验模块
from .frames import (FrameLimit, FrameParams, canonical_frames, cutoff_S, frame_limit, frame_q_norm,
                     inverse_rescale_G, littlewood_paley, relative_frame_limit, rescale_G, resample)
from .strong_convergence import ConvergenceCell, StrongConvergenceReport, strong_convergence_experiment
from .scaling_limit import ScalingCell, ScalingLimitReport, scaling_limit_experiment
from .approximate_solution import ResidualReport, approximate_solution_residual
