# 经典力学模块测试
import math
import os
import shutil
import sys
import tempfile
import unittest
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest
from numpy.testing import assert_allclose

from backend.classical.action import (action, action_batch, harmonic_action_exact, straight_line_action,
                                      straight_line_remainder)
from backend.classical.bvp import shoot, solve_bvp
from backend.classical.flow import flow, integrate, monodromy
from backend.classical.focal import analytic_focal_bound, focal_time
from backend.potential.hypothesis import Box
from backend.potential.potential import (AnisotropicQuadraticPotential, HarmonicPotential,
                                         IsotropicQuadraticPotential, PerturbedQuadraticPotential,
                                         ZeroPotential)
from backend.utils.exceptions import ConvergenceException, FocalTimeException
from backend.utils.output_writer import read_csv


class TestFlow(unittest.TestCase):
    """哈密顿流测试"""

    def test_harmonic_half_period(self):
        """测试谐振子半周期后 x → -x"""
        result = integrate(HarmonicPotential(), [1.0], [0.0], math.pi, dt=1e-3)
        assert_allclose(result.x, [-1.0], atol=1e-10)
        assert_allclose(result.xi, [0.0], atol=1e-10)

    def test_free_flow_is_exact(self):
        """测试零位势下 x = y + tη"""
        y = np.array([[0.5, -1.0], [2.0, 3.0]])
        eta = np.array([[1.0, 2.0], [-0.5, 0.25]])
        result = integrate(ZeroPotential(), y, eta, 1.7, dt=1e-2)
        assert_allclose(result.x, y + 1.7 * eta, rtol=1e-12, atol=1e-12)
        assert_allclose(result.xi, eta, rtol=0, atol=0)

    def test_energy_conservation(self):
        """测试四阶辛格式的能量漂移"""
        trajectory = flow(AnisotropicQuadraticPotential([0.5, 1.0]), [1.0, 0.0], [0.0, 1.0], 10.0, dt=1e-3)
        self.assertLess(trajectory.energy_drift(), 1e-10)
        self.assertEqual(trajectory.x.shape, (10001, 2))

    def test_time_reversibility(self):
        """测试正向积分后再反向积分回到初值"""
        p = PerturbedQuadraticPotential(0.5, 0.1, 1.0)
        forward = integrate(p, [0.3], [1.2], 2.0, dt=1e-3)
        backward = integrate(p, forward.x, forward.xi, -2.0, dt=1e-3)
        assert_allclose(backward.x, [0.3], atol=1e-11)
        assert_allclose(backward.xi, [1.2], atol=1e-11)

    def test_per_sample_times(self):
        """测试每个样本到达各自的终止时间"""
        p = HarmonicPotential()
        t = np.array([0.5, -0.25, 1.0])
        result = integrate(p, np.ones((3, 1)), np.zeros((3, 1)), t, dt=1e-3)
        assert_allclose(result.x[:, 0], np.cos(t), atol=1e-11)

    def test_monodromy_harmonic(self):
        """测试谐振子的变分矩阵"""
        dxdy, dxdeta = monodromy(HarmonicPotential(), [0.7], [0.1], 0.8, dt=1e-3)
        assert_allclose(dxdy[..., 0, 0], math.cos(0.8), atol=1e-11)
        assert_allclose(dxdeta[..., 0, 0], math.sin(0.8), atol=1e-11)

    def test_monodromy_small_time_slopes(self):
        """测试 ‖∂x/∂y - I‖ 与 ‖∂x/∂η - tI‖ 的对数斜率分别不小于 1.8 与 2.7"""
        times = [0.2, 0.1, 0.05, 0.025]
        for p, y, eta in [(HarmonicPotential(), [0.7], [0.1]),
                          (PerturbedQuadraticPotential(0.5, 0.3, [1.0, 1.0]), [0.4, -0.2], [0.3, 0.5])]:
            d = len(y)
            dy_errors, deta_errors = [], []
            for t in times:
                dxdy, dxdeta = monodromy(p, y, eta, t, dt=1e-3)
                dxdy = np.reshape(dxdy, (d, d))
                dxdeta = np.reshape(dxdeta, (d, d))
                dy_errors.append(np.linalg.norm(dxdy - np.eye(d), 2))
                deta_errors.append(np.linalg.norm(dxdeta - t * np.eye(d), 2))
            with self.subTest(potential=p.name):
                self.assertGreaterEqual(np.polyfit(np.log(times), np.log(dy_errors), 1)[0], 1.8)
                self.assertGreaterEqual(np.polyfit(np.log(times), np.log(deta_errors), 1)[0], 2.7)

    def test_trajectory_csv(self):
        """测试轨道导出"""
        tmp = tempfile.mkdtemp()
        try:
            trajectory = flow(HarmonicPotential(), [1.0], [0.0], 0.01, dt=1e-3)
            rows = read_csv(trajectory.write_csv(os.path.join(tmp, "traj.csv")))
            self.assertEqual(len(rows), 11)
            self.assertEqual(list(rows[0].keys()), ["t", "x0", "xi0", "H"])
            self.assertEqual(rows[0]["x0"], "1")
        finally:
            shutil.rmtree(tmp)


class TestBVP(unittest.TestCase):
    """两点边值问题测试"""

    def test_harmonic_bvp(self):
        """测试谐振子打靶：η = (x - y cos t)/sin t"""
        solution = solve_bvp(HarmonicPotential(), [-1.0], [1.0], 0.5)
        expected = (1.0 + math.cos(0.5)) / math.sin(0.5)
        assert_allclose(solution.eta, [expected], rtol=1e-10)
        self.assertLessEqual(solution.residual, 1e-10)

    def test_negative_time(self):
        """测试负时间"""
        solution = solve_bvp(HarmonicPotential(), [0.0], [1.0], -0.5)
        assert_allclose(solution.eta, [1.0 / math.sin(-0.5)], rtol=1e-10)

    def test_focal_bound_enforced(self):
        """测试超出焦点界与 t = 0 时报错"""
        with self.assertRaises(FocalTimeException):
            solve_bvp(HarmonicPotential(), [0.0], [1.0], 2.5)
        with self.assertRaises(FocalTimeException):
            solve_bvp(HarmonicPotential(), [0.0], [1.0], 0.0)
        with self.assertRaises(FocalTimeException):
            solve_bvp(HarmonicPotential(), [0.0], [1.0], 0.5, focal_bound=0.1)

    def test_harmonic_newton_steps(self):
        """测试谐振子在 t ≤ 0.5、|x|, |y| ≤ 5 时至多 5 步 Newton 迭代"""
        rng = np.random.default_rng(7)
        y = rng.uniform(-5.0, 5.0, size=(100, 1))
        x = rng.uniform(-5.0, 5.0, size=(100, 1))
        t = rng.uniform(0.05, 0.5, size=100)
        batch = shoot(HarmonicPotential(), y, x, t)
        self.assertLessEqual(batch.iterations, 5)
        self.assertLessEqual(batch.residual, 1e-10)
        assert_allclose(batch.eta[:, 0], (x[:, 0] - y[:, 0] * np.cos(t)) / np.sin(t), rtol=1e-9, atol=1e-9)

    def test_residual_is_absolute(self):
        """测试残差是终点的绝对偏差，不随 |x| 缩放"""
        solution = solve_bvp(HarmonicPotential(), [40.0], [50.0], 0.3)
        end = integrate(HarmonicPotential(), [40.0], solution.eta, 0.3)
        self.assertAlmostEqual(solution.residual, abs(float(np.ravel(end.x)[0]) - 50.0), delta=1e-12)
        self.assertLessEqual(solution.residual, 1e-10)

    def test_nonconvergence(self):
        """测试迭代次数不足时报错"""
        with self.assertRaises(ConvergenceException):
            shoot(HarmonicPotential(), np.array([[0.0]]), np.array([[1.0]]), np.array([0.5]), max_iter=1)

    def test_two_dimensional(self):
        """测试二维各向异性位势"""
        p = AnisotropicQuadraticPotential([0.5, 2.0])
        solution = solve_bvp(p, [0.0, 0.0], [1.0, 1.0], 0.4)
        # 各方向独立：ω_i = √(2c_i)
        omega = np.sqrt(2.0 * np.array([0.5, 2.0]))
        assert_allclose(solution.eta, omega / np.sin(omega * 0.4), rtol=1e-10)

@pytest.mark.parametrize("potential,d", [
    (ZeroPotential(), 1),
    (HarmonicPotential(), 1),
    (IsotropicQuadraticPotential(0.25), 2),
    (AnisotropicQuadraticPotential([0.5, 2.0]), 2),
    (PerturbedQuadraticPotential(0.5, 0.3, [1.0, 1.0]), 2),
], ids=["zero", "harmonic", "isotropic", "anisotropic", "perturbed"])
def test_shooting_round_trip(potential, d):
    """测试 100 个随机 (y, x, t)：用打靶得到的 η 重新积分回到 x"""
    rng = np.random.default_rng(2024)
    y = rng.uniform(-5.0, 5.0, size=(100, d))
    x = rng.uniform(-5.0, 5.0, size=(100, d))
    t = rng.uniform(0.05, 0.5, size=100)
    batch = shoot(potential, y, x, t)
    end = integrate(potential, y, batch.eta, t)
    assert np.linalg.norm(end.x - x, axis=-1).max() <= 1e-10



class TestAction(unittest.TestCase):
    """作用量测试"""

    def test_harmonic_action_oracle(self):
        """测试 200 个随机样本与谐振子闭式作用量一致"""
        rng = np.random.default_rng(20240101)
        t = 1.0 - rng.random(200)
        x = rng.uniform(-5.0, 5.0, size=(200, 1))
        y = rng.uniform(-5.0, 5.0, size=(200, 1))
        batch = action_batch(HarmonicPotential(), t, x, y)
        exact = harmonic_action_exact(t, x, y)
        rel = np.abs(batch.S - exact) / np.maximum(np.abs(exact), 1.0)
        self.assertLess(rel.max(), 1e-8)

    def test_single_action_example(self):
        """测试 t = 0.5, x = 1, y = -1"""
        result = action(HarmonicPotential(), 0.5, [1.0], [-1.0])
        self.assertAlmostEqual(result.S, 1.0 / math.tan(0.25), places=10)
        self.assertAlmostEqual(result.omega, (result.S - 4.0) / 0.5, places=12)

    def test_action_symmetry(self):
        """测试 S(t, x, y) = S(t, y, x)（位势时间无关）"""
        p = PerturbedQuadraticPotential(0.5, 0.1, 1.0)
        forward = action(p, 0.7, [1.3], [-0.4])
        backward = action(p, 0.7, [-0.4], [1.3])
        self.assertAlmostEqual(forward.S, backward.S, places=10)

    def test_free_action(self):
        """测试零位势作用量 |x-y|²/2t，ω = 0"""
        result = action(ZeroPotential(), 0.3, [2.0, 1.0], [0.5, -1.0])
        self.assertAlmostEqual(result.S, (1.5 ** 2 + 2.0 ** 2) / 0.6, places=12)
        self.assertAlmostEqual(result.omega, 0.0, places=10)

    def test_straight_line_harmonic(self):
        """测试谐振子直线近似 2/t - t/6（x = 1, y = -1）"""
        t = np.array([0.2, 0.1])
        line = straight_line_action(HarmonicPotential(), t, np.ones((2, 1)), -np.ones((2, 1)))
        assert_allclose(line, 2.0 / t - t / 6.0, rtol=1e-13)


@pytest.mark.parametrize("potential", [HarmonicPotential(), PerturbedQuadraticPotential(0.5, 0.1, 1.0)],
                         ids=["harmonic", "perturbed"])
def test_straight_line_remainder_is_cubic(potential):
    """测试 |S - S_line| 的对数斜率在 [2.7, 3.3] 内"""
    result = straight_line_remainder(potential, [0.2, 0.1, 0.05, 0.025], [1.0], [-1.0])
    assert 2.7 <= result["slope"] <= 3.3


class TestFocal(unittest.TestCase):
    """焦点时间测试"""

    def test_analytic_bound_harmonic(self):
        """测试 sin s / s = 1/2 的根"""
        bound = analytic_focal_bound(HarmonicPotential(), 1)
        self.assertAlmostEqual(math.sin(bound) / bound, 0.5, places=10)
        self.assertEqual(analytic_focal_bound(ZeroPotential(), 2), math.inf)

    def test_empirical_matches_analytic_for_harmonic(self):
        """测试谐振子的经验焦点时间与解析界一致（精度为步长）"""
        estimate = focal_time(HarmonicPotential(), Box.symmetric(2.0, 1), 3.0, samples=32, dt=1e-2)
        self.assertTrue(estimate.crossed)
        self.assertLessEqual(abs(estimate.delta0 - analytic_focal_bound(HarmonicPotential(), 1)), 2e-2)

    def test_analytic_bound_is_conservative(self):
        """测试解析界不超过经验焦点时间"""
        p = PerturbedQuadraticPotential(0.5, 0.2, [1.0, 0.5])
        estimate = focal_time(p, Box.symmetric(3.0, 2), 4.0, samples=128, dt=1e-2, seed=7)
        self.assertLessEqual(analytic_focal_bound(p, 2), estimate.delta0 + 1e-2)

    def test_strong_perturbation_focal_time(self):
        """测试 δ=0.5、ε=0.3、k=(1, 1) 的焦点时间估计大于 0.3"""
        p = PerturbedQuadraticPotential(0.5, 0.3, [1.0, 1.0])
        self.assertGreater(analytic_focal_bound(p, 2), 0.3)
        estimate = focal_time(p, Box.symmetric(3.0, 2), 0.6, samples=64, dt=1e-2, seed=3)
        self.assertGreater(estimate.delta0, 0.3)


if __name__ == '__main__':
    unittest.main()
