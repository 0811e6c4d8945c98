"""pytest配置文件"""

import pytest
import sys
import os

# 添加项目根目录到路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.utils.logger import lab_logger
from backend.utils.worker_pool import worker_pool


@pytest.fixture(scope="session", autouse=True)
def setup_test_logging():
    """设置测试日志会话"""
    # 开始测试会话日志
    log_path = lab_logger.start_session(is_test=True)
    print(f"测试日志保存到: {log_path}")

    yield

    # 结束测试会话日志
    lab_logger.end_session()


@pytest.fixture(autouse=True)
def test_logging(request):
    """为每个测试添加日志分隔符"""
    test_name = request.node.name
    lab_logger.log_info(f"开始测试: {test_name}")

    yield

    lab_logger.log_info(f"结束测试: {test_name}")
    lab_logger.log_info("-" * 50)


@pytest.fixture
def serial_pool():
    """单线程工作池，测试结束后恢复缺省线程数"""
    worker_pool.configure(1)
    yield worker_pool
    worker_pool.configure(None)
