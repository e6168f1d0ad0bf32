"""绘图模拟：把落笔线段栅格化并统计长度与用时"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from skimage.draw import line

from ..api.exceptions import ParameterError
from ..plan.trajectory import Trajectory
from .workspace import CommandOp, PlotProgram, ProgramStats, WorkspaceConfig
from logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class SimulationResult:
    raster: np.ndarray
    stats: ProgramStats
    resolution: float

    def to_dict(self) -> Dict[str, Any]:
        data = self.stats.to_dict()
        data['resolution_px_per_mm'] = round(self.resolution, 6)
        data['raster_shape'] = list(self.raster.shape)
        data['ink_pixels'] = int(self.raster.sum())
        return data


def raster_shape(ws: WorkspaceConfig, resolution: float) -> Tuple[int, int]:
    return int(math.floor(ws.height_mm * resolution)) + 1, int(math.floor(ws.width_mm * resolution)) + 1


def to_raster(ws: WorkspaceConfig, x_mm: float, y_mm: float, resolution: float) -> Tuple[int, int]:
    """机器坐标转模拟画布的 (行, 列)"""
    col = int(math.floor(x_mm * resolution + 0.5))
    row = int(math.floor((ws.height_mm - y_mm) * resolution + 0.5))
    return row, col


def simulate(prog: PlotProgram, resolution: Optional[float] = None) -> SimulationResult:
    """以 1 像素笔宽栅格化落笔线段

    resolution 为 px/mm，默认 1 / scale，即画布像素与素描像素一一对应。
    """
    ws = prog.workspace
    if resolution is None:
        resolution = 1.0 / ws.scale
    if resolution <= 0:
        raise ParameterError(f"simulation resolution must be > 0, got {resolution}")
    h, w = raster_shape(ws, resolution)
    raster = np.zeros((h, w), dtype=bool)
    pen_down = False
    position = None
    for command in prog.commands:
        if command.op is CommandOp.PEN_DOWN:
            pen_down = True
            if position is not None:
                r, c = to_raster(ws, *position, resolution)
                if 0 <= r < h and 0 <= c < w:
                    raster[r, c] = True
        elif command.op is CommandOp.PEN_UP:
            pen_down = False
        else:
            target = (command.x, command.y)
            if pen_down and position is not None:
                r0, c0 = to_raster(ws, *position, resolution)
                r1, c1 = to_raster(ws, *target, resolution)
                rr, cc = line(r0, c0, r1, c1)
                keep = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
                raster[rr[keep], cc[keep]] = True
            position = target
    stats = prog.stats()
    logger.debug(
        f"Simulation finished - draw_mm: {stats.draw_mm:.3f} - travel_mm: {stats.travel_mm:.3f} - "
        f"seconds: {stats.seconds:.3f} - ink_pixels: {int(raster.sum())}"
    )
    return SimulationResult(raster, stats, resolution)


def mask_raster(pixels: np.ndarray, ws: WorkspaceConfig, resolution: Optional[float] = None) -> np.ndarray:
    """把素描像素掩码 (行, 列) 经与 to_machine 相同的映射投到模拟画布"""
    if resolution is None:
        resolution = 1.0 / ws.scale
    h, w = raster_shape(ws, resolution)
    raster = np.zeros((h, w), dtype=bool)
    for y, x in np.argwhere(pixels):
        mx, my = ws.pixel_to_machine(int(x), int(y))
        r, c = to_raster(ws, round(mx, 3), round(my, 3), resolution)
        if 0 <= r < h and 0 <= c < w:
            raster[r, c] = True
    return raster


def planned_raster(traj: Trajectory, ws: WorkspaceConfig, resolution: Optional[float] = None) -> np.ndarray:
    """规划轨迹经过的像素点投到模拟画布"""
    pixels = np.zeros((ws.px_height, ws.px_width), dtype=bool)
    for stroke in traj.strokes:
        for x, y in stroke.points:
            pixels[int(y), int(x)] = True
    return mask_raster(pixels, ws, resolution)


def jaccard(a: np.ndarray, b: np.ndarray) -> float:
    """|a ∩ b| / |a ∪ b|，两者都为空时为 1"""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)
