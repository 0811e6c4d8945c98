# 非线性演化模块
from .problem import NLSProblem, default_power, nonlinearity_constant, strichartz_exponent
from .observables import (ObservableSeries, detect_blowup, energy, nonlinear_integral,
                          potential_energy, qh_form, strichartz_S, strichartz_density)
from .split_step import EvolutionResult, SplitStepSolver, split_step_evolve, time_reversal_defect
from .ground_state import ENERGY_W_EXACT, KINETIC_W_EXACT, GroundState, ground_state_W
from .threshold import ThresholdCell, ThresholdSweep, cutoff_w, threshold_sweep
