"""G-code 输出与解析

方言：M5 抬笔，M3 S1000 落笔，G0 空走，G1 绘制（F 为 mm/min）。
头部注释携带工作区参数，解析时据此还原 WorkspaceConfig。
"""
from typing import Dict, List

from ..api.exceptions import FormatError
from .workspace import Command, CommandOp, PlotProgram, WorkspaceConfig
from logger import setup_logger

logger = setup_logger(__name__)

PEN_UP = "M5"
PEN_DOWN = "M3 S1000"
FOOTER = "M2"
_HEADER_KEYS = ('px_width', 'px_height', 'width_mm', 'height_mm', 'margin_mm',
                'feed_rate', 'travel_rate', 'lift_time')
_INT_KEYS = ('px_width', 'px_height')


def _header(ws: WorkspaceConfig) -> List[str]:
    lines = ["; penportrait plot program"]
    for key in _HEADER_KEYS:
        value = getattr(ws, key)
        lines.append(f"; {key}: {value if key in _INT_KEYS else repr(float(value))}")
    lines += ["G21", "G90"]
    return lines


def emit_gcode(prog: PlotProgram) -> str:
    """生成 G-code 文本（确定性输出，以换行结尾）

    Raises:
        PlotBoundsError: 有坐标超出工作区，消息中给出命令序号
    """
    prog.validate()
    feed = f"F{prog.workspace.feed_rate * 60:g}"
    lines = _header(prog.workspace)
    pen_down = False
    for command in prog.commands:
        if command.op is CommandOp.PEN_UP:
            lines.append(PEN_UP)
            pen_down = False
        elif command.op is CommandOp.PEN_DOWN:
            lines.append(PEN_DOWN)
            pen_down = True
        elif pen_down:
            lines.append(f"G1 X{command.x:.3f} Y{command.y:.3f} {feed}")
        else:
            lines.append(f"G0 X{command.x:.3f} Y{command.y:.3f}")
    lines.append(FOOTER)
    return "\n".join(lines) + "\n"


def _parse_xy(words: List[str], line_no: int) -> Dict[str, float]:
    values = {}
    for word in words[1:]:
        axis = word[:1].upper()
        if axis in ('X', 'Y', 'F'):
            try:
                values[axis] = float(word[1:])
            except ValueError:
                raise FormatError(f"line {line_no}: bad number '{word}'")
    if 'X' not in values or 'Y' not in values:
        raise FormatError(f"line {line_no}: move needs X and Y")
    return values


def parse_gcode(text: str) -> PlotProgram:
    """解析本方言的 G-code，还原 PlotProgram"""
    settings: Dict[str, str] = {}
    commands: List[Command] = []
    pen_down = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition(';')
        comment = comment.strip()
        if comment and ':' in comment:
            key, _, value = comment.partition(':')
            if key.strip() in _HEADER_KEYS:
                settings[key.strip()] = value.strip()
        words = code.split()
        if not words:
            continue
        op = words[0].upper()
        if op in ('G21', 'G90', 'M2'):
            continue
        if op == 'M5':
            commands.append(Command(CommandOp.PEN_UP))
            pen_down = False
        elif op == 'M3':
            commands.append(Command(CommandOp.PEN_DOWN))
            pen_down = True
        elif op in ('G0', 'G00', 'G1', 'G01'):
            drawing = op in ('G1', 'G01')
            if drawing != pen_down:
                raise FormatError(f"line {line_no}: {op} issued with pen {'down' if pen_down else 'up'}")
            values = _parse_xy(words, line_no)
            commands.append(Command(CommandOp.MOVE, values['X'], values['Y']))
        else:
            raise FormatError(f"line {line_no}: unsupported command '{words[0]}'")
    missing = [key for key in _HEADER_KEYS if key not in settings]
    if missing:
        raise FormatError(f"G-code header missing workspace keys: {', '.join(missing)}")
    try:
        ws = WorkspaceConfig(**{
            key: int(settings[key]) if key in _INT_KEYS else float(settings[key]) for key in _HEADER_KEYS
        })
    except ValueError as e:
        raise FormatError(f"bad G-code header value: {e}")
    program = PlotProgram(ws, commands).validate()
    logger.debug(f"G-code parsed - commands: {len(commands)}")
    return program
