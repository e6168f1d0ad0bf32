"""绘图输出：工作区映射、G-code、SVG 与模拟"""
from .workspace import WorkspaceConfig, PlotProgram, Command, CommandOp, ProgramStats, to_machine
from .gcode import emit_gcode, parse_gcode
from .svg import emit_svg
from .simulator import SimulationResult, simulate, mask_raster, planned_raster, jaccard

__all__ = [
    'WorkspaceConfig',
    'PlotProgram',
    'Command',
    'CommandOp',
    'ProgramStats',
    'to_machine',
    'emit_gcode',
    'parse_gcode',
    'emit_svg',
    'SimulationResult',
    'simulate',
    'mask_raster',
    'planned_raster',
    'jaccard',
]
