"""SVG 输出：每段落笔轨迹一条 polyline"""
from typing import List, Tuple

import svgwrite

from .workspace import CommandOp, PlotProgram
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_PEN_WIDTH_MM = 0.3


def pen_down_runs(prog: PlotProgram) -> List[List[Tuple[float, float]]]:
    """落笔点加随后各次移动组成的点列"""
    runs: List[List[Tuple[float, float]]] = []
    position = None
    current = None
    for command in prog.commands:
        if command.op is CommandOp.MOVE:
            position = (command.x, command.y)
            if current is not None:
                current.append(position)
        elif command.op is CommandOp.PEN_DOWN:
            current = [position] if position is not None else []
            runs.append(current)
        else:
            current = None
    return runs


def emit_svg(prog: PlotProgram, pen_width_mm: float = DEFAULT_PEN_WIDTH_MM) -> str:
    """文档尺寸等于工作区（mm），SVG 的 y 向下，故 y_svg = 高度 - y"""
    ws = prog.workspace
    dwg = svgwrite.Drawing(
        size=(f"{ws.width_mm:g}mm", f"{ws.height_mm:g}mm"),
        viewBox=f"0 0 {ws.width_mm:g} {ws.height_mm:g}",
        profile='tiny',
    )
    group = dwg.g(fill='none', stroke='black', stroke_width=pen_width_mm,
                  stroke_linecap='round', stroke_linejoin='round')
    runs = pen_down_runs(prog)
    for run in runs:
        group.add(dwg.polyline([(x, round(ws.height_mm - y, 3)) for x, y in run]))
    dwg.add(group)
    logger.debug(f"SVG emitted - polylines: {len(runs)}")
    return dwg.tostring() + "\n"
