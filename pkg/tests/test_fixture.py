import os
import shutil

import numpy as np
import pytest

import make_fixture
from penportrait.api.exceptions import ConfigError
from penportrait.core.fixture import make_eyebrow_patch, write_fixture
from penportrait.mask.annotations import load_annotations
from penportrait.mask.labels import FaceLabel
from penportrait.utils.config import load_config
from penportrait.utils.file_utils import load_gray_png, load_label_png

from conftest import ROOT


class TestWriteFixture:
    def test_shipped_config_inputs_exist(self, tmp_path):
        shutil.copy(os.path.join(ROOT, 'penportrait.ini'), tmp_path / 'penportrait.ini')
        write_fixture(str(tmp_path / 'data'))
        cfg = load_config(str(tmp_path / 'penportrait.ini'), path_overrides={})
        cfg.require_paths('photo', 'labels', 'annotations', 'styles')
        assert len(cfg.style_paths) == 2
        assert cfg.train.content_images and cfg.content_label_paths
        for path in cfg.train.content_images + tuple(cfg.content_label_paths):
            assert os.path.exists(path)

    def test_images_share_dims(self, tmp_path):
        files = write_fixture(str(tmp_path), size=64)
        assert load_gray_png(files['photo']).shape == (64, 64)
        assert load_label_png(files['labels']).shape == (64, 64)
        assert load_gray_png(files['style_b']).shape == (64, 64)
        assert load_label_png(files['train_labels_1']).shape == (64, 64)

    def test_annotations_point_into_face_parts(self, tmp_path):
        files = write_fixture(str(tmp_path))
        labels = load_label_png(files['labels'])
        annotations = load_annotations(files['annotations']).validate(*labels.shape)
        for x, y in annotations.eye_centers:
            assert labels[y, x] in (FaceLabel.L_EYE, FaceLabel.R_EYE)
        assert len(annotations.eyebrow_patches) == 2
        for patch in annotations.eyebrow_patches:
            x, y, w, h = patch.rect
            region = labels[y:y + h, x:x + w]
            assert np.isin(region, (FaceLabel.L_BROW, FaceLabel.R_BROW)).any()
            assert (patch.image == 0).any()

    def test_patch_covers_brow(self):
        labels = np.zeros((16, 16), dtype=np.int64)
        labels[5:7, 4:10] = FaceLabel.L_BROW
        patch, x, y = make_eyebrow_patch(labels, FaceLabel.L_BROW)
        assert (x, y) == (3, 4)
        assert patch.shape == (4, 8)

    def test_deterministic(self, tmp_path):
        a = write_fixture(str(tmp_path / 'a'))
        b = write_fixture(str(tmp_path / 'b'))
        for name in a:
            with open(a[name], 'rb') as fa, open(b[name], 'rb') as fb:
                assert fa.read() == fb.read(), name

    @pytest.mark.parametrize('size', [8, 30])
    def test_bad_size(self, tmp_path, size):
        with pytest.raises(ConfigError):
            write_fixture(str(tmp_path), size=size)


class TestCommandLine:
    def test_writes_fixture(self, tmp_path, capsys):
        assert make_fixture.run(['--out', str(tmp_path / 'data'), '--size', '32']) == 0
        assert os.path.exists(tmp_path / 'data' / 'annotations.ini')
        assert '"photo"' in capsys.readouterr().out

    def test_bad_size_exit_code(self, tmp_path):
        assert make_fixture.run(['--out', str(tmp_path), '--size', '30']) == 2
