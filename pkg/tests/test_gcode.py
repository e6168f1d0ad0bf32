import pytest

from penportrait.api.exceptions import FormatError, PlotBoundsError
from penportrait.plan.trajectory import Stroke, Trajectory
from penportrait.plot.gcode import emit_gcode, parse_gcode
from penportrait.plot.workspace import Command, CommandOp, PlotProgram, WorkspaceConfig, to_machine

HEADER_LINES = 11


def _program(*strokes, px=160, **ws_kwargs):
    ws = WorkspaceConfig(px_width=px, px_height=px, **ws_kwargs)
    return to_machine(Trajectory([Stroke(points) for points in strokes]), ws)


class TestEmitGcode:
    def test_empty_program_is_header_and_footer(self):
        text = emit_gcode(_program())
        lines = text.splitlines()
        assert text.endswith('\n')
        assert lines[0].startswith(';')
        assert lines[HEADER_LINES - 2:] == ['G21', 'G90', 'M2']

    def test_header_carries_workspace(self):
        lines = emit_gcode(_program(margin_mm=2.5)).splitlines()
        assert '; px_width: 160' in lines
        assert '; margin_mm: 2.5' in lines
        assert '; feed_rate: 20.0' in lines

    def test_two_point_stroke(self):
        lines = emit_gcode(_program(((0, 0), (1, 0)))).splitlines()
        assert lines[HEADER_LINES:] == [
            'G0 X0.000 Y160.000',
            'M3 S1000',
            'G1 X1.000 Y160.000 F1200',
            'M5',
            'M2',
        ]

    def test_feed_follows_workspace(self):
        text = emit_gcode(_program(((0, 0), (1, 0)), feed_rate=5))
        assert 'F300' in text

    def test_deterministic(self):
        prog = _program(((0, 0), (5, 5)), ((9, 1),))
        assert emit_gcode(prog) == emit_gcode(prog)

    def test_out_of_bounds(self):
        ws = WorkspaceConfig(px_width=10, px_height=10)
        prog = PlotProgram(ws, [Command(CommandOp.MOVE, -1.0, 0.0)])
        with pytest.raises(PlotBoundsError, match='command 0'):
            emit_gcode(prog)


class TestParseGcode:
    def test_emit_parse_emit_fixed_point(self):
        prog = _program(((0, 0), (1, 1), (2, 1)), ((10, 10),), ((40, 3), (40, 4)), px=64, margin_mm=4)
        text = emit_gcode(prog)
        parsed = parse_gcode(text)
        assert parsed.workspace == prog.workspace
        assert emit_gcode(parsed) == text

    def test_parsed_stats_match(self):
        prog = _program(((0, 0), (20, 0)), ((30, 30), (30, 50)))
        parsed = parse_gcode(emit_gcode(prog))
        assert parsed.stats().to_dict() == prog.stats().to_dict()

    def test_unsupported_command(self):
        text = emit_gcode(_program()).replace('G90', 'G28')
        with pytest.raises(FormatError, match='G28'):
            parse_gcode(text)

    def test_missing_header(self):
        with pytest.raises(FormatError, match='header'):
            parse_gcode('G21\nG90\nM2\n')

    def test_draw_move_with_pen_up(self):
        text = emit_gcode(_program()).replace('M2', 'G1 X1 Y1 F1200\nM2')
        with pytest.raises(FormatError, match='pen up'):
            parse_gcode(text)

    def test_bad_number(self):
        text = emit_gcode(_program()).replace('M2', 'G0 Xabc Y1\nM2')
        with pytest.raises(FormatError, match='bad number'):
            parse_gcode(text)

    def test_parsed_moves_checked_against_workspace(self):
        text = emit_gcode(_program()).replace('M2', 'G0 X500 Y1\nM2')
        with pytest.raises(PlotBoundsError):
            parse_gcode(text)
