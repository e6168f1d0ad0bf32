"""异常类定义"""
from typing import Optional


class PenPortraitError(Exception):
    """流水线错误基类"""
    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None):
        self.message = message
        self.field = field
        super().__init__(self.message)


class ShapeError(PenPortraitError):
    """张量/图像尺寸不匹配"""
    pass


class ParameterError(PenPortraitError):
    """参数取值非法"""
    pass


class UsageError(PenPortraitError):
    """调用方式违反约定（缺少缓存、非二值输入等）"""
    pass


class ConfigError(PenPortraitError):
    """配置错误"""
    exit_code = 2


class DataError(PenPortraitError):
    """输入数据错误"""
    exit_code = 3


class FormatError(DataError):
    """文件格式错误（检查点、G-code）"""
    pass


class PlotBoundsError(DataError):
    """坐标超出工作区"""
    pass
