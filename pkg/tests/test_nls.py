# 非线性演化模块测试
import math
import os
import sys
import unittest
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest
from numpy.testing import assert_allclose

from backend.linprop.field_factory import FieldFactory, soliton_profile
from backend.linprop.grid import GridSpec
from backend.nls.ground_state import ENERGY_W_EXACT, KINETIC_W_EXACT, ground_state_W, radial_oracles
from backend.nls.observables import (ObservableSeries, detect_blowup, energy, qh_form,
                                     strichartz_S)
from backend.nls.problem import NLSProblem
from backend.nls.split_step import split_step_evolve, time_reversal_defect
from backend.nls.threshold import OUTCOME_BLOWUP, OUTCOME_BOUNDED, OUTCOME_ESCAPED, threshold_sweep
from backend.potential.potential import HarmonicPotential, ZeroPotential
from backend.utils.exceptions import DomainException
from config.enums import FieldPreset


class TestProblem(unittest.TestCase):
    """问题定义测试"""

    def test_defaults(self):
        """测试缺省指数与相关常数"""
        prob = NLSProblem(ZeroPotential(), -1, GridSpec(3, 4.0, 16))
        self.assertEqual(prob.power, 4.0)
        self.assertTrue(prob.energy_critical)
        self.assertAlmostEqual(prob.c_p, 1.0 / 3.0)
        self.assertEqual(prob.q, 10.0)
        self.assertEqual(NLSProblem(ZeroPotential(), 1, GridSpec(1, 4.0, 16)).power, 4.0)

    def test_invalid(self):
        """测试非法的 μ 与指数"""
        grid = GridSpec(1, 4.0, 16)
        with self.assertRaises(DomainException):
            NLSProblem(ZeroPotential(), 2, grid)
        with self.assertRaises(DomainException):
            NLSProblem(ZeroPotential(), 1, grid, power=-1.0)


class TestObservables(unittest.TestCase):
    """观测量测试"""

    def test_linear_ground_energy(self):
        """测试线性问题中基态的能量 1/2"""
        grid = GridSpec(1, 10.0, 512)
        prob = NLSProblem(HarmonicPotential(), 0, grid)
        u = FieldFactory.create_field(grid, FieldPreset.HERMITE_GROUND)
        assert_allclose(energy(prob, u), 0.5, rtol=1e-10)
        assert_allclose(qh_form(prob, u), energy(prob, u), rtol=1e-14)

    def test_strichartz_integral(self):
        """测试时空积分的梯形公式与端点插值"""
        series = ObservableSeries(times=[0.0, 1.0, 2.0], strichartz_density=[0.0, 1.0, 2.0])
        self.assertAlmostEqual(strichartz_S(series, (0.0, 2.0)), 2.0)
        self.assertAlmostEqual(strichartz_S(series, (0.5, 1.5)), 1.0)
        self.assertEqual(strichartz_S(series, (1.0, 1.0)), 0.0)
        with self.assertRaises(DomainException):
            strichartz_S(series, (0.0, 3.0))
        with self.assertRaises(DomainException):
            strichartz_S(ObservableSeries(), (0.0, 1.0))

    def test_detect_blowup(self):
        """测试上确界或动能超过阈值的首个时刻"""
        series = ObservableSeries(times=[0.0, 0.1, 0.2, 0.3], sup_norm=[1.0, 2.0, 20.0, 50.0],
                                  kinetic=[1.0, 1.5, 3.0, 400.0])
        self.assertEqual(detect_blowup(series, blowup_factor=10.0, grad_factor=1e3), 0.2)
        self.assertEqual(detect_blowup(series, blowup_factor=100.0, grad_factor=100.0), 0.3)
        self.assertIsNone(detect_blowup(series, blowup_factor=100.0, grad_factor=1e3))
        self.assertIsNone(detect_blowup(ObservableSeries()))


class TestSplitStep(unittest.TestCase):
    """分裂步演化测试"""

    def setUp(self):
        self.grid = GridSpec(1, 12.0, 1024)
        self.prob = NLSProblem(HarmonicPotential(), 1, self.grid, power=4.0)
        self.u0 = FieldFactory.create_field(self.grid, FieldPreset.GAUSSIAN, {"width": 1.0})

    def test_conservation(self):
        """测试质量与能量守恒"""
        result = split_step_evolve(self.prob, self.u0, 1.0, 1e-3)
        self.assertEqual(result.steps, 1000)
        self.assertAlmostEqual(result.t_final, 1.0)
        self.assertFalse(result.blowup)
        self.assertLess(result.series.mass_drift(), 1e-10)
        self.assertLess(result.series.energy_drift(), 1e-6)

    def test_energy_drift_second_order(self):
        """测试步长减半时能量漂移约缩小为四分之一"""
        coarse = split_step_evolve(self.prob, self.u0, 1.0, 2e-3, record_every=1)
        fine = split_step_evolve(self.prob, self.u0, 1.0, 1e-3, record_every=1)
        ratio = coarse.series.energy_drift() / fine.series.energy_drift()
        self.assertGreaterEqual(ratio, 3.5)

    def test_time_reversal(self):
        """测试 conj(u(-T)) = u(T)"""
        self.assertLess(time_reversal_defect(self.prob, self.u0, 0.5, 1e-3), 1e-10)

    def test_time_reversal_requires_real_data(self):
        u0 = FieldFactory.create_field(self.grid, FieldPreset.GAUSSIAN, {"momentum": 1.0})
        with self.assertRaises(DomainException):
            time_reversal_defect(self.prob, u0, 0.5, 1e-3)

    def test_backward_evolution(self):
        """测试先向前再向后演化回到初值"""
        forward = split_step_evolve(self.prob, self.u0, 0.3, 1e-3)
        backward = split_step_evolve(self.prob, forward.field, -0.3, 1e-3)
        self.assertLess(backward.field.relative_l2_error(self.u0), 1e-10)

    def test_invalid_step(self):
        with self.assertRaises(DomainException):
            split_step_evolve(self.prob, self.u0, 1.0, 0.0)
        with self.assertRaises(DomainException):
            split_step_evolve(self.prob, self.u0, 1.0, 1e-3, record_every=0)

    def test_standing_wave(self):
        """测试一维聚焦五次方程的驻波 e^{it}Q"""
        grid = GridSpec(1, 8.0, 1024)
        prob = NLSProblem(ZeroPotential(), -1, grid, power=4.0)
        u0 = FieldFactory.create_field(grid, FieldPreset.SOLITON)
        result = split_step_evolve(prob, u0, 0.1, 1e-4, boundary_tol=1e-6)
        exact = u0.with_values(np.exp(0.1j) * soliton_profile(grid.axis()))
        self.assertFalse(result.blowup)
        self.assertLess(result.field.relative_l2_error(exact), 1e-5)

    def test_supercritical_blowup(self):
        """测试质量超过孤子的聚焦初值被检测到爆破"""
        grid = GridSpec(1, 8.0, 4096)
        prob = NLSProblem(ZeroPotential(), -1, grid, power=4.0)
        u0 = FieldFactory.create_field(grid, FieldPreset.SOLITON, {"scale": 1.2})
        result = split_step_evolve(prob, u0, 0.5, 1e-4, grad_factor=100.0, boundary_tol=1e-6)
        self.assertTrue(result.blowup)
        self.assertLess(result.blowup_time, 0.5)
        self.assertEqual(result.blowup_time, detect_blowup(result.series, grad_factor=100.0))


class TestGroundState(unittest.TestCase):
    """基态 W 测试"""

    def test_radial_oracles(self):
        """测试 ‖∇W‖² 与 E_Δ(W) = ‖∇W‖²/3"""
        kinetic, energy_w = radial_oracles()
        assert_allclose(kinetic, KINETIC_W_EXACT, rtol=1e-10)
        assert_allclose(energy_w, ENERGY_W_EXACT, rtol=1e-10)
        assert_allclose(KINETIC_W_EXACT, 9.0657, rtol=1e-4)

    def test_small_grid(self):
        """测试 W(0) = 1 与参数检查"""
        state = ground_state_W(GridSpec(3, 6.4, 32), radius=3.0)
        self.assertEqual(state.w_zero, 1.0)
        self.assertLess(state.kinetic_box, KINETIC_W_EXACT)
        with self.assertRaises(DomainException):
            ground_state_W(GridSpec(1, 6.4, 32))
        with self.assertRaises(DomainException):
            ground_state_W(GridSpec(3, 6.4, 32), radius=6.4)

    @pytest.mark.slow
    def test_elliptic_residual(self):
        """测试 |x| ≤ 5 上 ½ΔW + W⁵ 的四阶差分残差"""
        state = ground_state_W(GridSpec(3, 6.4, 256), radius=5.0)
        self.assertEqual(state.w_zero, 1.0)
        self.assertLess(state.residual, 1e-4)


class TestThresholdSweep(unittest.TestCase):
    """阈值扫描测试"""

    def test_requires_focusing_critical(self):
        """测试只接受三维聚焦能量临界问题"""
        with self.assertRaises(DomainException):
            threshold_sweep(NLSProblem(ZeroPotential(), -1, GridSpec(1, 8.0, 64)), [1.0], 0.1, 1e-3)
        with self.assertRaises(DomainException):
            threshold_sweep(NLSProblem(ZeroPotential(), 1, GridSpec(3, 8.0, 16)), [1.0], 0.1, 1e-3)

    @pytest.mark.slow
    def test_sweep_outcomes(self):
        """测试每个初值都得到一个结局，且能量比随动能比变化"""
        prob = NLSProblem(ZeroPotential(), -1, GridSpec(3, 8.0, 64))
        sweep = threshold_sweep(prob, [0.8, 1.2], 0.2, 1e-3, cutoff=4.0, grad_factor=100.0)
        self.assertEqual([c.kinetic_ratio for c in sweep.cells], [0.8, 1.2])
        for cell in sweep.cells:
            self.assertIn(cell.outcome, (OUTCOME_BLOWUP, OUTCOME_BOUNDED, OUTCOME_ESCAPED))
        self.assertEqual(len(sweep.rows()[0]), len(sweep.COLUMNS))


if __name__ == '__main__':
    unittest.main()
