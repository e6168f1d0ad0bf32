import re
import xml.etree.ElementTree as ET

import pytest

from penportrait.plan.trajectory import Stroke, Trajectory
from penportrait.plot.svg import emit_svg, pen_down_runs
from penportrait.plot.workspace import WorkspaceConfig, to_machine

SVG_NS = '{http://www.w3.org/2000/svg}'


def _program(*strokes):
    ws = WorkspaceConfig(px_width=160, px_height=160)
    return to_machine(Trajectory([Stroke(points) for points in strokes]), ws)


def _polylines(text):
    root = ET.fromstring(text)
    return root, list(root.iter(f'{SVG_NS}polyline'))


def _points(polyline):
    numbers = [float(v) for v in re.findall(r'-?\d+(?:\.\d+)?', polyline.get('points'))]
    return list(zip(numbers[0::2], numbers[1::2]))


class TestEmitSvg:
    def test_document_size_matches_workspace(self):
        root, polylines = _polylines(emit_svg(_program()))
        assert root.get('width') == '160mm'
        assert root.get('viewBox') == '0 0 160 160'
        assert polylines == []

    def test_one_polyline_per_stroke(self):
        _, polylines = _polylines(emit_svg(_program(((0, 0), (5, 0)), ((9, 9),), ((3, 7), (4, 8), (5, 8)))))
        assert len(polylines) == 3
        assert [len(_points(p)) for p in polylines] == [2, 1, 3]

    def test_y_axis_points_down(self):
        _, polylines = _polylines(emit_svg(_program(((2, 10), (3, 10)))))
        assert _points(polylines[0]) == [pytest.approx((2.0, 10.0)), pytest.approx((3.0, 10.0))]

    def test_stroke_style(self):
        text = emit_svg(_program(((0, 0), (1, 0))), pen_width_mm=0.5)
        group = ET.fromstring(text).find(f'{SVG_NS}g')
        assert group.get('fill') == 'none'
        assert group.get('stroke-width') == '0.5'


class TestPenDownRuns:
    def test_runs_start_at_pen_down_position(self):
        runs = pen_down_runs(_program(((0, 0), (1, 0)), ((5, 5),)))
        assert runs == [[(0.0, 160.0), (1.0, 160.0)], [(5.0, 155.0)]]
