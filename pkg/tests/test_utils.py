# 工作池与输出写入测试
import math
import os
import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from backend.potential.hypothesis import CHUNK_SIZE, Box, verify_hypotheses
from backend.potential.potential import PerturbedQuadraticPotential
from backend.utils.exceptions import (BoundaryMassException, ConfigException, FocalTimeException,
                                      LabException, NonFiniteException)
from backend.utils.output_writer import format_float, read_csv, to_json_text, write_csv
from backend.utils.worker_pool import worker_pool


def test_map_keeps_order(serial_pool):
    assert serial_pool.workers == 1
    assert serial_pool.map(lambda v: v * v, [3, 1, 2]) == [9, 1, 4]
    serial_pool.configure(4)
    assert serial_pool.map(lambda v: v * v, range(10)) == [v * v for v in range(10)]


def test_negative_workers(serial_pool):
    with pytest.raises(ValueError):
        serial_pool.configure(-1)


def test_results_independent_of_workers(serial_pool):
    """测试线程数不影响假设检验报告（逐位相同）"""
    p = PerturbedQuadraticPotential(0.5, 0.1, [1.0, 0.5])
    box = Box.symmetric(4.0, 2)
    serial = verify_hypotheses(p, box, 3 * CHUNK_SIZE, seed=5)
    worker_pool.configure(4)
    parallel = verify_hypotheses(p, box, 3 * CHUNK_SIZE, seed=5)
    assert to_json_text(serial) == to_json_text(parallel)


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(2.0) == "2"
    assert format_float(math.inf) == "null"
    assert format_float(float("nan")) == "null"


def test_json_text_is_canonical():
    """测试键排序、numpy 类型与非有限值"""
    text = to_json_text({"b": np.float64(1.5), "a": [np.int64(1), 2], "c": None, "d": math.nan})
    assert text == '{\n  "a": [1, 2],\n  "b": 1.5,\n  "c": null,\n  "d": null\n}\n'


def test_csv_round_trip(tmp_path):
    path = write_csv(str(tmp_path / "sub" / "table.csv"), ["t", "ok", "note"],
                     [[0.5, True, None], [np.float64(0.25), False, "x"]])
    rows = read_csv(path)
    assert rows == [{"t": "0.5", "ok": "true", "note": ""},
                    {"t": "0.25", "ok": "false", "note": "x"}]


@pytest.mark.parametrize("exc, code", [
    (ConfigException("bad"), 2),
    (FocalTimeException(2.0, 1.9), 3),
    (BoundaryMassException(1e-3, 1e-8, "初值"), 3),
    (NonFiniteException("u"), 4),
])
def test_exit_codes(exc, code):
    assert isinstance(exc, LabException)
    assert exc.exit_code == code
