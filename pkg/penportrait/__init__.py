"""penportrait：人像照片到笔式绘图仪的流水线"""
from .api.exceptions import (
    PenPortraitError,
    ShapeError,
    ParameterError,
    UsageError,
    ConfigError,
    DataError,
    FormatError,
    PlotBoundsError,
)

__version__ = '0.1.0'

__all__ = [
    'PenPortraitError',
    'ShapeError',
    'ParameterError',
    'UsageError',
    'ConfigError',
    'DataError',
    'FormatError',
    'PlotBoundsError',
    '__version__',
]
