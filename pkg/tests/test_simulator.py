import numpy as np
import pytest

from penportrait.api.exceptions import ParameterError
from penportrait.plan.trajectory import Stroke, Trajectory
from penportrait.plot.gcode import emit_gcode, parse_gcode
from penportrait.plot.simulator import jaccard, mask_raster, planned_raster, raster_shape, simulate
from penportrait.plot.workspace import Command, CommandOp, PlotProgram, WorkspaceConfig, to_machine


def _traj(*strokes):
    return Trajectory([Stroke(points) for points in strokes])


class TestSimulate:
    def test_empty_program(self):
        ws = WorkspaceConfig(px_width=32, px_height=32)
        result = simulate(PlotProgram(ws))
        assert not result.raster.any()
        assert result.stats.seconds == 0
        assert result.stats.lifts == 0

    def test_raster_matches_sketch_pixels(self):
        ws = WorkspaceConfig(px_width=160, px_height=160)
        result = simulate(to_machine(_traj(((2, 5), (8, 5))), ws))
        assert result.raster.shape == raster_shape(ws, 1.0) == (161, 161)
        expected = np.zeros_like(result.raster)
        expected[5, 2:9] = True
        np.testing.assert_array_equal(result.raster, expected)

    def test_single_point_stroke_marks_pixel(self):
        ws = WorkspaceConfig(px_width=160, px_height=160)
        result = simulate(to_machine(_traj(((7, 3),)), ws))
        assert result.raster[3, 7] and result.raster.sum() == 1

    def test_time_excludes_initial_approach(self):
        ws = WorkspaceConfig(px_width=16, px_height=16, feed_rate=10, lift_time=0.5)
        prog = PlotProgram(ws, [
            Command(CommandOp.MOVE, 50.0, 50.0),
            Command(CommandOp.PEN_DOWN),
            Command(CommandOp.MOVE, 60.0, 50.0),
            Command(CommandOp.PEN_UP),
        ])
        assert simulate(prog).stats.seconds == pytest.approx(1.5)

    def test_gcode_round_trip_same_raster(self):
        ws = WorkspaceConfig(px_width=40, px_height=40, margin_mm=2)
        prog = to_machine(_traj(((0, 0), (1, 1), (2, 2)), ((30, 4), (30, 5)), ((12, 39),)), ws)
        direct = simulate(prog)
        replayed = simulate(parse_gcode(emit_gcode(prog)))
        np.testing.assert_array_equal(direct.raster, replayed.raster)
        assert direct.stats == replayed.stats

    def test_planned_raster_agrees(self):
        ws = WorkspaceConfig(px_width=64, px_height=48)
        traj = _traj(tuple((x, 10) for x in range(5, 40)), tuple((20, y) for y in range(12, 40)))
        result = simulate(to_machine(traj, ws))
        assert jaccard(result.raster, planned_raster(traj, ws)) >= 0.95

    def test_mask_raster_matches_planned_pixels(self):
        ws = WorkspaceConfig(px_width=40, px_height=30, margin_mm=3)
        pixels = np.zeros((30, 40), dtype=bool)
        pixels[7, 4:30] = True
        traj = _traj(tuple((x, 7) for x in range(4, 30)))
        np.testing.assert_array_equal(mask_raster(pixels, ws), planned_raster(traj, ws))

    def test_mask_reference_sees_dropped_ink(self):
        ws = WorkspaceConfig(px_width=32, px_height=32)
        pixels = np.zeros((32, 32), dtype=bool)
        pixels[5, 2:22] = True
        pixels[20, 2:22] = True
        traj = _traj(tuple((x, 5) for x in range(2, 22)))
        result = simulate(to_machine(traj, ws))
        assert jaccard(result.raster, planned_raster(traj, ws)) == 1.0
        assert jaccard(result.raster, mask_raster(pixels, ws)) == pytest.approx(0.5)

    def test_bad_resolution(self):
        with pytest.raises(ParameterError):
            simulate(PlotProgram(WorkspaceConfig(px_width=8, px_height=8)), resolution=0)

    def test_to_dict(self):
        ws = WorkspaceConfig(px_width=160, px_height=160)
        data = simulate(to_machine(_traj(((0, 0), (3, 0))), ws)).to_dict()
        assert data['ink_pixels'] == 4
        assert data['draw_mm'] == pytest.approx(3.0)


class TestJaccard:
    def test_both_empty(self):
        assert jaccard(np.zeros((3, 3)), np.zeros((3, 3))) == 1.0

    def test_partial_overlap(self):
        a = np.array([[1, 1, 0, 0]], dtype=bool)
        b = np.array([[0, 1, 1, 0]], dtype=bool)
        assert jaccard(a, b) == pytest.approx(1 / 3)
