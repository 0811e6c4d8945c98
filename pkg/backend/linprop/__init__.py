# 线性传播子模块
from .grid import BOUNDARY_TOL, Field, GridSpec
from .field_factory import FieldFactory, bump_cutoff, smooth_step, soliton_profile, w_profile
from .free import free_multiplier, free_propagate
from .mehler import mehler_apply, mehler_matrix, mehler_prefactor
from .spectral import (SpectralBasis, apply_hamiltonian, basis_cache, potential_on_grid,
                       q_form, q_norm, spectral_basis, spectral_propagate)
from .fujiwara import (FujiwaraResult, KernelTable, build_kernel_table, fujiwara_apply,
                       fujiwara_propagate, kernel_cache, kernel_dt)
from .dispersive import DispersiveSeries, dispersive_ratio, free_gaussian_ratio, harmonic_ratio_bound
