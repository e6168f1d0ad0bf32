"""共享测试夹具：合成人脸标签、照片、素描与小网络"""
import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from penportrait.core.fixture import make_face_labels, make_face_photo, make_style_sketch  # noqa: E402,F401
from penportrait.net.checkpoint import Checkpoint  # noqa: E402
from penportrait.net.network import build_decoder, build_encoder  # noqa: E402

TINY_WIDTHS = (2, 3, 4, 5)


@pytest.fixture
def face_labels():
    return make_face_labels()


@pytest.fixture
def face_photo(face_labels):
    return make_face_photo(face_labels)


@pytest.fixture
def style_sketch():
    return make_style_sketch()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_encoder():
    return build_encoder(TINY_WIDTHS, seed=0)


@pytest.fixture
def tiny_decoder():
    return build_decoder(TINY_WIDTHS, seed=1)


@pytest.fixture
def tiny_encoder64():
    return build_encoder(TINY_WIDTHS, seed=0, dtype=np.float64)


@pytest.fixture
def tiny_decoder64():
    return build_decoder(TINY_WIDTHS, seed=1, dtype=np.float64)


@pytest.fixture
def tiny_checkpoint(tiny_encoder, tiny_decoder):
    return Checkpoint(tiny_encoder, tiny_decoder, {'iteration': 0, 'seed': 0})


def bar_sketch(shape=(20, 20), rows=slice(9, 11), cols=slice(3, 17)) -> np.ndarray:
    sketch = np.ones(shape, dtype=np.float32)
    sketch[rows, cols] = 0
    return sketch


def sketch_from_ink(ink: np.ndarray) -> np.ndarray:
    """墨点布尔图转二值素描（墨 = 0）"""
    return np.where(ink, 0.0, 1.0).astype(np.float32)
