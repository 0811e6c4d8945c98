# 配置模块测试
import copy
import glob
import json
import os
import shutil
import sys
import tempfile
import unittest
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from config.config_loader import (config_hash, env_overrides, load_config, load_config_dict,
                                  resolve_config_path, split_seed_workers)
from config.enums import (ClassicalOperation, ExperimentOperation, FieldPreset, PotentialName,
                          Subcommand)
from config.lab_config import LabConfig, PotentialConfig, RunConfig, SectionConfig
from config.section_params import ParamError, ParamTypeError, SectionParams

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
BASE_CONFIG = {
    "potential": {"name": "HARMONIC", "params": {}},
    "grid": {"d": 1, "L": 10.0, "n": 256},
    "field": {"preset": "GAUSSIAN", "params": {"width": 1.0}},
    "run": {"seed": 7, "workers": 2},
    "classical": {"operation": "action", "params": {"t": 0.5, "x": [1.0], "y": [-1.0]}},
}


class TestLabConfig(unittest.TestCase):
    """LabConfig 解析测试"""

    def test_from_dict(self):
        """测试完整配置的解析"""
        config = LabConfig.from_dict(BASE_CONFIG)
        self.assertEqual(config.potential.name, PotentialName.HARMONIC)
        self.assertEqual(config.grid.n, 256)
        self.assertEqual(config.initial_field.preset, FieldPreset.GAUSSIAN)
        self.assertEqual(config.run.seed, 7)
        self.assertEqual(config.sections[Subcommand.CLASSICAL].operation, ClassicalOperation.ACTION)
        self.assertNotIn(Subcommand.NLS, config.sections)

    def test_to_dict_reads_back(self):
        """测试 to_dict 的产物可以被 from_dict 读回"""
        config = LabConfig.from_dict(BASE_CONFIG)
        self.assertEqual(LabConfig.from_dict(config.to_dict()), config)

    def test_minimal_config(self):
        """测试只有位势的配置使用缺省运行参数"""
        config = LabConfig.from_dict({"potential": {"name": "ZERO"}})
        self.assertIsNone(config.grid)
        self.assertIsNone(config.initial_field)
        self.assertEqual(config.run.seed, 0)
        self.assertEqual(config.run.workers, 0)

    def test_dataclass_defaults(self):
        """测试直接构造时运行参数与小节使用各自独立的缺省值"""
        first = LabConfig(potential=PotentialConfig(name=PotentialName.ZERO))
        second = LabConfig(potential=PotentialConfig(name=PotentialName.ZERO))
        self.assertEqual(first.run, RunConfig())
        self.assertIsNone(first.initial_field)
        first.sections[Subcommand.VERIFY_POTENTIAL] = SectionConfig(operation=None)
        self.assertEqual(second.sections, {})
        self.assertEqual(LabConfig.from_dict(first.to_dict()).sections[Subcommand.VERIFY_POTENTIAL].params, {})

    def test_missing_fields(self):
        """测试缺少必需字段"""
        with self.assertRaises(ValueError):
            LabConfig.from_dict({})
        with self.assertRaises(ValueError):
            LabConfig.from_dict({"potential": {}})
        broken = copy.deepcopy(BASE_CONFIG)
        del broken["grid"]["n"]
        with self.assertRaises(ValueError):
            LabConfig.from_dict(broken)
        broken = copy.deepcopy(BASE_CONFIG)
        del broken["classical"]["operation"]
        with self.assertRaises(ValueError):
            LabConfig.from_dict(broken)

    def test_invalid_values(self):
        """测试非法的枚举与取值"""
        cases = [
            ("potential", {"name": "CUBIC"}),
            ("grid", {"d": 4, "L": 1.0, "n": 16}),
            ("grid", {"d": 1, "L": -1.0, "n": 16}),
            ("grid", {"d": 1, "L": 1.0, "n": 100}),
            ("grid", {"d": 1, "L": 1.0, "n": 4}),
            ("field", {"preset": "PLANE_WAVE"}),
            ("run", {"seed": 0, "workers": -1}),
            ("classical", {"operation": "quantize"}),
        ]
        for key, value in cases:
            broken = copy.deepcopy(BASE_CONFIG)
            broken[key] = value
            with self.subTest(key=key, value=value):
                with self.assertRaises(ValueError):
                    LabConfig.from_dict(broken)

    def test_invalid_types(self):
        """测试字段类型错误"""
        cases = [
            ("potential", "HARMONIC"),
            ("grid", {"d": "1", "L": 1.0, "n": 16}),
            ("grid", {"d": 1, "L": True, "n": 16}),
            ("run", {"seed": 1.5}),
            ("classical", {"operation": "action", "params": []}),
        ]
        for key, value in cases:
            broken = copy.deepcopy(BASE_CONFIG)
            broken[key] = value
            with self.subTest(key=key, value=value):
                with self.assertRaises(TypeError):
                    LabConfig.from_dict(broken)
        with self.assertRaises(TypeError):
            LabConfig.from_dict([BASE_CONFIG])


class TestConfigLoader(unittest.TestCase):
    """配置文件加载测试"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_resolve_by_name(self):
        """测试省略扩展名时在 config_file/ 下查找"""
        path = resolve_config_path("harmonic_action")
        self.assertEqual(path, os.path.join(PROJECT_ROOT, "config_file", "harmonic_action.json"))
        self.assertEqual(resolve_config_path("harmonic_action.json"), path)

    def test_load_by_path(self):
        """测试直接给出文件路径"""
        path = os.path.join(self.temp_dir, "custom.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(BASE_CONFIG, f)
        self.assertEqual(load_config(path), LabConfig.from_dict(BASE_CONFIG))

    def test_missing_and_malformed(self):
        """测试文件不存在与 JSON 格式错误"""
        with self.assertRaises(FileNotFoundError):
            load_config("no_such_config")
        path = os.path.join(self.temp_dir, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write("{\"potential\": ")
        with self.assertRaises(ValueError):
            load_config_dict(path)

    def test_config_hash(self):
        """测试配置哈希只依赖内容，不依赖键顺序"""
        config = LabConfig.from_dict(BASE_CONFIG)
        reordered = LabConfig.from_dict(dict(reversed(list(BASE_CONFIG.items()))))
        self.assertEqual(config_hash(config), config_hash(reordered))
        self.assertEqual(len(config_hash(config)), 64)
        changed = copy.deepcopy(BASE_CONFIG)
        changed["run"]["seed"] = 8
        self.assertNotEqual(config_hash(config), config_hash(LabConfig.from_dict(changed)))

    def test_env_overrides(self):
        """测试环境变量覆盖"""
        environ = {"SQLAB_CONFIG": "ground_state", "SQLAB_SEED": "3", "SQLAB_WORKERS": "2", "HOME": "/root"}
        overrides = env_overrides(environ)
        self.assertEqual(overrides, {"config": "ground_state", "seed": "3", "workers": "2"})
        self.assertEqual(split_seed_workers(overrides), (3, 2))
        self.assertEqual(split_seed_workers({}), (None, None))
        with self.assertRaises(ValueError):
            split_seed_workers({"seed": "abc"})


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(PROJECT_ROOT, "config_file", "*.json"))))
def test_shipped_configs_load(path):
    """测试随附的配置文件都能解析"""
    config = load_config(path)
    assert config.potential.name in PotentialName
    assert config.sections or os.path.basename(path) == "default_lab_config.json"


class TestSectionParams(unittest.TestCase):
    """小节参数读取测试"""

    def setUp(self):
        self.params = SectionParams("experiment", {
            "T": 1.5, "steps": 10, "flag": True, "method": "RESCALED", "x0": 2.0,
            "scales": [4, 8], "box": [[-1, 1], [-2, 2]], "bad": "text",
        })

    def test_scalars(self):
        self.assertEqual(self.params.float("T"), 1.5)
        self.assertEqual(self.params.float("dt", 1e-3), 1e-3)
        self.assertIsNone(self.params.float("focal_bound", None))
        self.assertEqual(self.params.int("steps", minimum=1), 10)
        self.assertTrue(self.params.bool("flag"))
        self.assertEqual(self.params.str("method", choices=["RESCALED", "PHYSICAL"]), "RESCALED")

    def test_lists(self):
        self.assertEqual(self.params.vector("x0", length=3), [2.0, 2.0, 2.0])
        self.assertEqual(self.params.float_list("scales"), [4.0, 8.0])
        self.assertEqual(self.params.matrix("box"), [[-1.0, 1.0], [-2.0, 2.0]])

    def test_errors(self):
        """测试错误信息带完整键路径"""
        with self.assertRaises(ParamError) as ctx:
            self.params.float("missing")
        self.assertIn("experiment.params", str(ctx.exception))
        with self.assertRaises(ParamTypeError) as ctx:
            self.params.float("bad")
        self.assertIn("experiment.params.bad", str(ctx.exception))
        with self.assertRaises(ParamError):
            self.params.int("steps", minimum=11)
        with self.assertRaises(ParamTypeError):
            self.params.int("T")
        with self.assertRaises(ParamError):
            self.params.str("method", choices=["PHYSICAL"])
        with self.assertRaises(ParamError):
            self.params.vector("scales", length=3)
        with self.assertRaises(ParamTypeError):
            self.params.float_list("bad")

    def test_operation_enum_values(self):
        """测试操作名与枚举值一致"""
        self.assertEqual(ExperimentOperation("strong-convergence"), ExperimentOperation.STRONG_CONVERGENCE)


if __name__ == '__main__':
    unittest.main()
