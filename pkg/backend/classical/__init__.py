# 经典力学模块
from .flow import DEFAULT_DT, FlowResult, Trajectory, flow, integrate, monodromy
from .focal import FOCAL_THRESHOLD, FocalEstimate, analytic_focal_bound, focal_time
from .bvp import BVPSolution, BVPBatch, solve_bvp, shoot, check_focal
from .action import (ActionResult, ActionBatch, action, action_batch, harmonic_action_exact,
                     straight_line_action, straight_line_remainder)
