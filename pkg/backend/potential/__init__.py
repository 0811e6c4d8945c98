# 位势模块
from .potential import (Potential, ZeroPotential, HarmonicPotential, IsotropicQuadraticPotential,
                        AnisotropicQuadraticPotential, PerturbedQuadraticPotential,
                        RescaledPotential, CallablePotential, as_points)
from .hypothesis import Box, HypothesisReport, verify_hypotheses, sample_box
