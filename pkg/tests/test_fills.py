import numpy as np
import pytest

from penportrait.api.exceptions import ShapeError, UsageError
from penportrait.mask.labels import FaceLabel
from penportrait.plan.fills import (
    fill_pixels,
    fill_regions,
    order_ring,
    peel_rings,
    plan_fills,
    region_thickness,
)
from penportrait.plan.trajectory import StrokeKind

from conftest import sketch_from_ink


def _eye_scene(ink_rows=slice(10, 15), ink_cols=slice(10, 15), label=FaceLabel.L_EYE):
    labels = np.full((32, 32), FaceLabel.SKIN, dtype=np.int64)
    labels[8:18, 8:18] = label
    ink = np.zeros((32, 32), dtype=bool)
    ink[ink_rows, ink_cols] = True
    return sketch_from_ink(ink), labels, ink


def _closed(points):
    (x0, y0), (x1, y1) = points[0], points[-1]
    return max(abs(x1 - x0), abs(y1 - y0)) == 1


class TestRegionThickness:
    def test_square(self):
        region = np.zeros((9, 9), dtype=bool)
        region[2:7, 2:7] = True
        assert region_thickness(region) == 5

    def test_single_pixel(self):
        assert region_thickness(np.ones((1, 1), dtype=bool)) == 1

    def test_empty(self):
        assert region_thickness(np.zeros((3, 3), dtype=bool)) == 0


class TestPeelRings:
    def test_square_rings_outside_in(self):
        region = np.zeros((7, 7), dtype=bool)
        region[1:6, 1:6] = True
        rings = peel_rings(region)
        assert [int(r.sum()) for r in rings] == [16, 8, 1]
        union = np.zeros_like(region)
        for ring in rings:
            assert not (union & ring).any()
            union |= ring
        np.testing.assert_array_equal(union, region)

    def test_order_ring_is_single_closed_loop(self):
        ring = np.zeros((7, 7), dtype=bool)
        ring[1:6, 1:6] = True
        ring[2:5, 2:5] = False
        paths = order_ring(ring)
        assert len(paths) == 1
        assert paths[0][0] == (1, 1)
        assert len(paths[0]) == 16
        assert _closed(paths[0])


class TestPlanFills:
    def test_square_in_eye_becomes_nested_loops(self):
        sketch, labels, ink = _eye_scene()
        loops = plan_fills(sketch, labels)
        assert [len(loop) for loop in loops] == [16, 8, 1]
        assert all(loop.kind is StrokeKind.FILL_LOOP for loop in loops)
        assert all(loop.is_connected() for loop in loops)
        assert all(_closed(loop.points) for loop in loops if len(loop) > 1)
        covered = {p for loop in loops for p in loop.points}
        assert covered == {(x, y) for y, x in np.argwhere(ink)}

    def test_fill_pixels_is_region_union(self):
        sketch, labels, ink = _eye_scene()
        np.testing.assert_array_equal(fill_pixels(sketch, labels), ink)

    def test_thin_line_not_filled(self):
        sketch, labels, _ = _eye_scene(ink_rows=slice(12, 13), ink_cols=slice(9, 16))
        assert plan_fills(sketch, labels) == []

    def test_outside_fill_labels_ignored(self):
        sketch, labels, _ = _eye_scene(label=FaceLabel.SKIN)
        assert plan_fills(sketch, labels) == []
        assert not fill_pixels(sketch, labels).any()

    def test_wide_pen_skips_region(self):
        sketch, labels, _ = _eye_scene()
        assert fill_regions(sketch, labels, pen_width=5) == []
        assert len(fill_regions(sketch, labels, pen_width=4)) == 1

    def test_brow_region_filled(self):
        sketch, labels, _ = _eye_scene(label=FaceLabel.R_BROW)
        assert len(plan_fills(sketch, labels)) == 3

    def test_requires_binary(self):
        _, labels, _ = _eye_scene()
        with pytest.raises(UsageError):
            plan_fills(np.full((32, 32), 0.5), labels)

    def test_shape_mismatch(self):
        sketch, _, _ = _eye_scene()
        with pytest.raises(ShapeError):
            plan_fills(sketch, np.zeros((8, 8), dtype=np.int64))
