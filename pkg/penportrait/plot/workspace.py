"""工作区几何与绘图程序"""
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..api.exceptions import ConfigError, DataError, PlotBoundsError
from ..plan.trajectory import Trajectory
from logger import setup_logger

logger = setup_logger(__name__)

COORD_DECIMALS = 3


@dataclass(frozen=True)
class WorkspaceConfig:
    """纸面工作区（毫米）与源素描像素尺寸

    速度单位 mm/s，抬笔时间单位 s。
    """
    px_width: int
    px_height: int
    width_mm: float = 160.0
    height_mm: float = 160.0
    margin_mm: float = 0.0
    feed_rate: float = 20.0
    travel_rate: float = 40.0
    lift_time: float = 0.4

    def __post_init__(self):
        for name in ('px_width', 'px_height', 'width_mm', 'height_mm', 'feed_rate', 'travel_rate'):
            if getattr(self, name) <= 0:
                raise ConfigError(f"workspace {name} must be > 0, got {getattr(self, name)}", field=name)
        if self.margin_mm < 0 or 2 * self.margin_mm >= min(self.width_mm, self.height_mm):
            raise ConfigError(f"workspace margin {self.margin_mm} leaves no drawable area", field='margin_mm')
        if self.lift_time < 0:
            raise ConfigError(f"lift_time must be >= 0, got {self.lift_time}", field='lift_time')

    @property
    def scale(self) -> float:
        """mm/px，保持纵横比"""
        return min((self.width_mm - 2 * self.margin_mm) / self.px_width,
                   (self.height_mm - 2 * self.margin_mm) / self.px_height)

    @property
    def offset(self) -> Tuple[float, float]:
        """居中偏移 (x, y)，单位 mm"""
        s = self.scale
        return (self.margin_mm + (self.width_mm - 2 * self.margin_mm - s * self.px_width) / 2,
                self.margin_mm + (self.height_mm - 2 * self.margin_mm - s * self.px_height) / 2)

    def pixel_to_machine(self, x: float, y: float) -> Tuple[float, float]:
        """像素 (x = 列, y = 行) 映射到机器坐标，y 轴向上"""
        off_x, off_y = self.offset
        s = self.scale
        return off_x + s * x, self.height_mm - (off_y + s * y)

    def machine_to_pixel(self, x_mm: float, y_mm: float) -> Tuple[float, float]:
        off_x, off_y = self.offset
        s = self.scale
        return (x_mm - off_x) / s, (self.height_mm - y_mm - off_y) / s

    def contains(self, x_mm: float, y_mm: float) -> bool:
        return 0.0 <= x_mm <= self.width_mm and 0.0 <= y_mm <= self.height_mm

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class CommandOp(str, Enum):
    PEN_UP = 'pen-up'
    PEN_DOWN = 'pen-down'
    MOVE = 'move-to'


@dataclass(frozen=True)
class Command:
    op: CommandOp
    x: Optional[float] = None
    y: Optional[float] = None


@dataclass(frozen=True)
class ProgramStats:
    """绘制长度、抬笔移动长度（不含初次进场）、抬笔次数与估计用时"""
    draw_mm: float
    travel_mm: float
    lifts: int
    seconds: float

    def to_dict(self) -> Dict[str, Any]:
        return {k: round(v, 6) if isinstance(v, float) else v for k, v in asdict(self).items()}


@dataclass
class PlotProgram:
    """设备命令序列"""
    workspace: WorkspaceConfig
    commands: List[Command] = field(default_factory=list)

    def validate(self) -> 'PlotProgram':
        """坐标必须在工作区内，笔状态必须交替"""
        pen_down = False
        for index, command in enumerate(self.commands):
            if command.op is CommandOp.MOVE:
                if not self.workspace.contains(command.x, command.y):
                    raise PlotBoundsError(
                        f"command {index} moves outside workspace - x: {command.x} - y: {command.y} - "
                        f"workspace: {self.workspace.width_mm}x{self.workspace.height_mm}",
                        field=f"command[{index}]",
                    )
            elif command.op is CommandOp.PEN_DOWN:
                if pen_down:
                    raise DataError(f"command {index} lowers a pen that is already down", field=f"command[{index}]")
                pen_down = True
            else:
                pen_down = False
        return self

    def stats(self) -> ProgramStats:
        """time = draw / feed + travel / travel_rate + lifts * lift_time"""
        ws = self.workspace
        draw = travel = 0.0
        lifts = 0
        pen_down = False
        position: Optional[Tuple[float, float]] = None
        for command in self.commands:
            if command.op is CommandOp.PEN_DOWN:
                pen_down = True
            elif command.op is CommandOp.PEN_UP:
                if pen_down:
                    lifts += 1
                pen_down = False
            else:
                target = (command.x, command.y)
                if position is not None:
                    length = math.hypot(target[0] - position[0], target[1] - position[1])
                    if pen_down:
                        draw += length
                    else:
                        travel += length
                position = target
        seconds = draw / ws.feed_rate + travel / ws.travel_rate + lifts * ws.lift_time
        return ProgramStats(draw, travel, lifts, seconds)


def to_machine(traj: Trajectory, ws: WorkspaceConfig) -> PlotProgram:
    """把像素轨迹缩放、居中并翻转 y 轴，生成绘图程序

    每笔：抬笔移动到起点，落笔，依次移动，抬笔。坐标保留 3 位小数。
    """
    program = PlotProgram(ws)
    for stroke_index, stroke in enumerate(traj.strokes):
        for x, y in stroke.points:
            if not (0 <= x < ws.px_width and 0 <= y < ws.px_height):
                raise DataError(
                    f"stroke {stroke_index} point ({x}, {y}) outside sketch {ws.px_width}x{ws.px_height}",
                    field=f"stroke[{stroke_index}]",
                )
        mapped = [ws.pixel_to_machine(x, y) for x, y in stroke.points]
        mapped = [(round(mx, COORD_DECIMALS), round(my, COORD_DECIMALS)) for mx, my in mapped]
        program.commands.append(Command(CommandOp.MOVE, *mapped[0]))
        program.commands.append(Command(CommandOp.PEN_DOWN))
        program.commands.extend(Command(CommandOp.MOVE, mx, my) for mx, my in mapped[1:])
        program.commands.append(Command(CommandOp.PEN_UP))
    program.validate()
    logger.debug(
        f"Program built - strokes: {len(traj.strokes)} - commands: {len(program.commands)} - "
        f"scale_mm_per_px: {ws.scale:.6f}"
    )
    return program
