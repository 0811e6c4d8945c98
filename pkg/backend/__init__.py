# 次二次位势 NLS 数值实验室后端
__version__ = "1.0.0"
