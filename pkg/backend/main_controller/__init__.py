# 主控制盘模块
from .main_controller import MainController
from .manifest import RunManifest, file_sha256
