import numpy as np
import pytest

from penportrait.api.exceptions import DataError
from penportrait.plan.gradient import GradientField, canny_gradient


def _step(vertical=True, size=16):
    img = np.ones((size, size), dtype=np.float32)
    if vertical:
        img[:, :size // 2] = 0
    else:
        img[:size // 2, :] = 0
    return img


class TestCannyGradient:
    def test_flat_image_has_no_edges(self):
        field = canny_gradient(np.ones((10, 10)))
        assert field.magnitude.max() == 0
        assert not field.edges.any()

    def test_vertical_step_points_along_x(self):
        field = canny_gradient(_step(vertical=True))
        r = 8
        c = int(np.argmax(field.magnitude[r]))
        assert c in (7, 8)
        assert field.orientation[r, c] == pytest.approx(0.0, abs=1e-6)

    def test_horizontal_step_points_along_y(self):
        field = canny_gradient(_step(vertical=False))
        c = 8
        r = int(np.argmax(field.magnitude[:, c]))
        assert r in (7, 8)
        assert field.orientation[r, c] == pytest.approx(np.pi / 2, abs=1e-6)

    def test_edges_are_thin_line_at_step(self):
        field = canny_gradient(_step(vertical=True))
        cols = set(np.argwhere(field.edges)[:, 1].tolist())
        assert cols and cols <= {7, 8}
        assert field.edges[4:12].any(axis=1).all()

    def test_shapes_match_input(self):
        field = canny_gradient(np.random.default_rng(0).random((12, 9)))
        assert field.shape == (12, 9)
        assert field.orientation.shape == field.edges.shape == (12, 9)

    def test_rejects_out_of_range(self):
        with pytest.raises(DataError):
            canny_gradient(np.full((4, 4), 2.0))

    def test_flat_field(self):
        field = GradientField.flat((3, 4))
        assert field.shape == (3, 4) and not field.edges.any()
