# 命令行入口与主控制器测试
import copy
import json
import math
import os
import shutil
import sys
import tempfile
import unittest
from unittest import mock
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

import main_lab
from backend.main_controller.main_controller import SUBCOMMAND_HANDLERS, MainController
from backend.main_controller.manifest import MANIFEST_SUFFIX, TOOL_NAME, file_sha256, manifest_name
from backend.utils.exceptions import ConfigException, FocalTimeException, NumericalException
from backend.utils.output_writer import read_csv
from config.enums import Subcommand
from config.lab_config import LabConfig

ACTION_CONFIG = {
    "potential": {"name": "HARMONIC", "params": {}},
    "run": {"seed": 11, "workers": 1},
    "verify": {"params": {"d": 1, "half_width": 3.0, "samples": 256}},
    "classical": {"operation": "action", "params": {"t": 0.5, "x": [1.0], "y": [-1.0]}},
}
ACTION_MANIFEST = manifest_name("classical_action")


class CliTestCase(unittest.TestCase):
    """在临时目录中写配置并运行命令行入口"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.out_dir = os.path.join(self.temp_dir, "out")

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def write_config(self, config, name="config.json"):
        path = os.path.join(self.temp_dir, name)
        with open(path, "w", encoding="utf-8") as f:
            if isinstance(config, str):
                f.write(config)
            else:
                json.dump(config, f)
        return path

    def read_json(self, name, out_dir=None):
        with open(os.path.join(out_dir or self.out_dir, name), encoding="utf-8") as f:
            return json.load(f)


class TestMainLab(CliTestCase):
    """main_lab.main 测试"""

    def test_classical_action(self):
        """测试单点作用量与谐振子闭式 cot(1/4) 一致"""
        path = self.write_config(ACTION_CONFIG)
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", self.out_dir], environ={}), 0)
        result = self.read_json("classical_action.json")
        self.assertAlmostEqual(result["S_exact"], 1.0 / math.tan(0.25), places=12)
        self.assertLess(abs(result["S"] - result["S_exact"]), 1e-8)

    def test_manifest(self):
        """测试运行清单的字段与输出哈希"""
        path = self.write_config(ACTION_CONFIG)
        main_lab.main(["classical", "-c", path, "-o", self.out_dir], environ={})
        manifest = self.read_json(ACTION_MANIFEST)
        self.assertEqual(manifest["tool"], TOOL_NAME)
        self.assertEqual(manifest["subcommand"], "classical")
        self.assertEqual(manifest["operation"], "action")
        self.assertEqual(manifest["seed"], 11)
        self.assertEqual(len(manifest["config_hash"]), 64)
        self.assertEqual(manifest["params"], ACTION_CONFIG["classical"]["params"])
        self.assertEqual([entry["file"] for entry in manifest["outputs"]], ["classical_action.json"])
        digest = file_sha256(os.path.join(self.out_dir, "classical_action.json"))
        self.assertEqual(manifest["outputs"][0]["sha256"], digest)

    def test_deterministic_outputs(self):
        """测试同一配置两次运行的输出哈希相同"""
        config = copy.deepcopy(ACTION_CONFIG)
        config["classical"] = {"operation": "action",
                               "params": {"cases": 20, "d": 2, "t_max": 1.0, "radius": 2.0}}
        path = self.write_config(config)
        other = os.path.join(self.temp_dir, "other")
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", self.out_dir, "--workers", "1"],
                                       environ={}), 0)
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", other, "--workers", "4"],
                                       environ={}), 0)
        first, second = self.read_json(ACTION_MANIFEST), self.read_json(ACTION_MANIFEST, other)
        self.assertEqual(first["outputs"], second["outputs"])
        self.assertEqual(first["config_hash"], second["config_hash"])
        rows = read_csv(os.path.join(self.out_dir, "classical_action.csv"))
        self.assertEqual(len(rows), 20)
        self.assertLess(max(float(r["relative_error"]) for r in rows), 1e-8)

    def test_operation_argument(self):
        """测试命令行操作名覆盖配置中的操作"""
        config = copy.deepcopy(ACTION_CONFIG)
        config["classical"] = {"operation": "flow", "params": {"t": 0.5, "x": [1.0], "y": [-1.0]}}
        path = self.write_config(config)
        self.assertEqual(main_lab.main(["classical", "action", "-c", path, "-o", self.out_dir],
                                       environ={}), 0)
        self.assertEqual(self.read_json(ACTION_MANIFEST)["operation"], "action")
        self.assertEqual(main_lab.main(["classical", "quantize", "-c", path, "-o", self.out_dir],
                                       environ={}), 2)

    def test_verify_potential(self):
        path = self.write_config(ACTION_CONFIG)
        self.assertEqual(main_lab.main(["verify-potential", "-c", path, "-o", self.out_dir], environ={}), 0)
        self.assertTrue(self.read_json("verify_potential.json")["passed"])

    def test_two_runs_share_output_dir(self):
        """测试两个子命令写入同一目录时各自保留运行清单"""
        path = self.write_config(ACTION_CONFIG)
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", self.out_dir], environ={}), 0)
        self.assertEqual(main_lab.main(["verify-potential", "-c", path, "-o", self.out_dir], environ={}), 0)
        classical = self.read_json(ACTION_MANIFEST)
        verify = self.read_json(manifest_name("verify_potential"))
        self.assertEqual(classical["subcommand"], "classical")
        self.assertEqual([entry["file"] for entry in classical["outputs"]], ["classical_action.json"])
        self.assertEqual(verify["subcommand"], "verify-potential")
        self.assertEqual([entry["file"] for entry in verify["outputs"]], ["verify_potential.json"])
        digest = file_sha256(os.path.join(self.out_dir, "classical_action.json"))
        self.assertEqual(classical["outputs"][0]["sha256"], digest)

    def test_malformed_config(self):
        """测试格式错误的配置返回 2 且不写任何输出"""
        path = self.write_config("{\"potential\": [", name="broken.json")
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", self.out_dir], environ={}), 2)
        self.assertFalse(os.path.exists(self.out_dir))

    def test_invalid_params(self):
        """测试参数类型错误返回 2 且不写任何输出"""
        config = copy.deepcopy(ACTION_CONFIG)
        config["classical"]["params"]["t"] = "half"
        path = self.write_config(config)
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", self.out_dir], environ={}), 2)
        self.assertFalse(os.path.exists(self.out_dir))

    def test_missing_config(self):
        self.assertEqual(main_lab.main(["classical", "-c", "no_such_config", "-o", self.out_dir],
                                       environ={}), 2)

    def test_focal_time_exit_code(self):
        """测试超出焦点时间返回 3"""
        config = copy.deepcopy(ACTION_CONFIG)
        config["classical"]["params"]["t"] = 2.0
        path = self.write_config(config)
        self.assertEqual(main_lab.main(["classical", "-c", path, "-o", self.out_dir], environ={}), 3)
        self.assertFalse(os.path.exists(os.path.join(self.out_dir, ACTION_MANIFEST)))

    def test_environment_overrides(self):
        """测试环境变量提供配置、输出目录与种子，命令行参数优先"""
        path = self.write_config(ACTION_CONFIG)
        environ = {"SQLAB_CONFIG": path, "SQLAB_OUT": self.out_dir, "SQLAB_SEED": "5"}
        self.assertEqual(main_lab.main(["classical"], environ=environ), 0)
        self.assertEqual(self.read_json(ACTION_MANIFEST)["seed"], 5)
        self.assertEqual(main_lab.main(["classical", "--seed", "9"], environ=environ), 0)
        self.assertEqual(self.read_json(ACTION_MANIFEST)["seed"], 9)
        self.assertEqual(main_lab.main(["classical"], environ=dict(environ, SQLAB_WORKERS="many")), 2)


class TestMainController(CliTestCase):
    """MainController 测试"""

    def setUp(self):
        super().setUp()
        self.controller = MainController()
        self.controller.set_config(LabConfig.from_dict(ACTION_CONFIG))

    def test_run_returns_manifest(self):
        manifest = self.controller.run(Subcommand.CLASSICAL, self.out_dir)
        self.assertEqual(manifest.seed, 11)
        self.assertIn("classical_action.json", manifest.output_hashes())
        self.assertGreaterEqual(manifest.wall_time, 0.0)

    def test_missing_section(self):
        """测试配置中没有对应小节"""
        with self.assertRaises(ConfigException):
            self.controller.run(Subcommand.NLS, self.out_dir)
        with self.assertRaises(ConfigException):
            self.controller.select_operation(Subcommand.NLS, "evolve")

    def test_select_operation_changes_hash(self):
        before = self.controller.config_hash
        self.controller.select_operation(Subcommand.CLASSICAL, "bvp")
        self.assertNotEqual(self.controller.config_hash, before)
        with self.assertRaises(ConfigException):
            self.controller.select_operation(Subcommand.VERIFY_POTENTIAL, "anything")

    def test_precondition_propagates(self):
        config = copy.deepcopy(ACTION_CONFIG)
        config["classical"]["params"]["t"] = 2.0
        self.controller.set_config(LabConfig.from_dict(config))
        with self.assertRaises(FocalTimeException) as ctx:
            self.controller.run(Subcommand.CLASSICAL, self.out_dir)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_numeric_value_error_is_numerical(self):
        """测试操作内部的 ValueError 转为数值错误（退出码 4），不当作配置错误"""
        def failing_handler(ctx, operation):
            raise ValueError("array must not contain infs or NaNs")

        with mock.patch.dict(SUBCOMMAND_HANDLERS, {Subcommand.CLASSICAL: failing_handler}):
            with self.assertRaises(NumericalException) as ctx:
                self.controller.run(Subcommand.CLASSICAL, self.out_dir)
        self.assertEqual(ctx.exception.exit_code, 4)
        self.assertFalse(os.path.exists(os.path.join(self.out_dir, ACTION_MANIFEST)))

    def test_param_error_is_config(self):
        """测试参数读取器的类型错误仍是配置错误（退出码 2）"""
        config = copy.deepcopy(ACTION_CONFIG)
        config["classical"]["params"]["x"] = "origin"
        self.controller.set_config(LabConfig.from_dict(config))
        with self.assertRaises(ConfigException) as ctx:
            self.controller.run(Subcommand.CLASSICAL, self.out_dir)
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_load_config_errors(self):
        with self.assertRaises(ConfigException):
            self.controller.load_config("no_such_config")
        path = self.write_config({"potential": {"name": "CUBIC"}})
        with self.assertRaises(ConfigException):
            self.controller.load_config(path)


@pytest.mark.parametrize("config_name", ["harmonic_action", "action_remainder", "classical_flow"])
def test_shipped_classical_configs(config_name, tmp_path):
    """测试随附的经典力学配置可以直接运行"""
    assert main_lab.main(["classical", "-c", config_name, "-o", str(tmp_path)], environ={}) == 0
    assert len(list(tmp_path.glob("*" + MANIFEST_SUFFIX))) == 1


if __name__ == '__main__':
    unittest.main()
