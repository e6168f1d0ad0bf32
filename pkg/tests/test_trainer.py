import csv

import numpy as np
import pytest

from penportrait.api.exceptions import ConfigError
from penportrait.mask.sparsity import derive_sparsity_mask
from penportrait.net.checkpoint import checkpoint_to_bytes
from penportrait.net.losses import self_consistency_loss
from penportrait.net.synthesis import ink_split, synthesize
from penportrait.net.trainer import (
    LOSS_LOG_HEADER,
    PRESETS,
    LossRecord,
    TrainConfig,
    Trainer,
    TrainingData,
    batch_masks,
    loss_and_grads,
    split_validation,
    train,
)
from penportrait.nn import Tensor4

from conftest import TINY_WIDTHS, make_face_labels, make_face_photo, make_style_sketch


def _data(count=3, h=32, w=32):
    labels = make_face_labels(h, w)
    contents = np.stack([make_face_photo(labels, seed=i) for i in range(count)])
    masks = np.stack([derive_sparsity_mask(labels, radius=1)] * count)
    styles = np.stack([make_style_sketch(h, w), make_style_sketch(h, w, period=4, seed=1)])
    return TrainingData(contents, masks, styles)


def _cfg(**overrides):
    base = dict(iterations=3, batch_size=2, lr=1e-3, encoder_widths=TINY_WIDTHS, validation_fraction=0.0,
                log_every=0, seed=7)
    base.update(overrides)
    return TrainConfig(**base)


class TestTrainConfig:
    @pytest.mark.parametrize('field,value', [
        ('lambda4', -1.0), ('batch_size', 0), ('lr', 0.0), ('iterations', -1),
        ('sparsity_mode', 'local'), ('validation_fraction', 1.0), ('encoder_widths', (1, 2)),
    ])
    def test_invalid_values_name_the_field(self, field, value):
        with pytest.raises(ConfigError) as info:
            TrainConfig(**{field: value})
        assert info.value.field == field

    def test_presets(self):
        assert set(PRESETS) == {'adain', 'consist', 'global-sparse', 'compositional-sparse'}
        cfg = TrainConfig.from_preset('adain')
        assert cfg.weights()['consist'] == 0 and cfg.weights()['sparse'] == 0
        assert TrainConfig.from_preset('global-sparse').sparsity_mode == 'global'

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            TrainConfig.from_preset('pix2pix')

    def test_defaults(self):
        cfg = TrainConfig()
        assert (cfg.lambda1, cfg.lambda2, cfg.lambda3, cfg.lambda4) == (1.0, 1.0, 1.0, 10.0)


class TestTrainingData:
    def test_rejects_empty_contents(self):
        with pytest.raises(ConfigError):
            TrainingData(np.zeros((0, 16, 16)), np.zeros((0, 16, 16)), np.ones((1, 16, 16)))

    def test_rejects_mask_mismatch(self):
        with pytest.raises(ConfigError):
            TrainingData(np.ones((2, 16, 16)), np.ones((1, 16, 16)), np.ones((1, 16, 16)))


class TestHelpers:
    def test_global_mode_uses_ones(self):
        masks = np.zeros((2, 4, 4), dtype=np.float32)
        assert batch_masks(masks, TrainConfig(sparsity_mode='global')).min() == 1
        assert batch_masks(masks, TrainConfig()).max() == 0

    def test_split_keeps_one_training_image(self):
        train_idx, val_idx = split_validation(2, 0.9, np.random.default_rng(0))
        assert len(train_idx) == 1 and len(val_idx) == 1

    def test_split_fraction(self):
        train_idx, val_idx = split_validation(40, 0.05, np.random.default_rng(0))
        assert len(val_idx) == 2
        assert sorted(np.concatenate([train_idx, val_idx]).tolist()) == list(range(40))

    def test_loss_record_row(self):
        record = LossRecord.from_breakdown(4, {'content': 1.0, 'style': 0.5, 'consist': 0.0, 'sparse': 2.0,
                                               'total': 3.5})
        assert record.to_row() == ['4', '1', '0.5', '0', '2', '3.5']


class TestLossAndGrads:
    def test_grads_cover_every_decoder_parameter(self, tiny_encoder, tiny_decoder):
        data = _data(count=2)
        total, breakdown, grads = loss_and_grads(data.contents, data.masks, data.styles[0],
                                                 tiny_encoder, tiny_decoder, _cfg())
        assert breakdown['total'] == pytest.approx(total)
        assert all(breakdown[k] > 0 for k in ('content', 'style', 'consist', 'sparse'))
        assert len(grads) == 18
        assert all(np.isfinite(g).all() for g in grads.values())

    def test_disabled_terms_report_zero(self, tiny_encoder, tiny_decoder):
        data = _data(count=1)
        _, breakdown, _ = loss_and_grads(data.contents, data.masks, data.styles[0], tiny_encoder, tiny_decoder,
                                         _cfg(use_consist=False, use_sparse=False))
        assert breakdown['consist'] == 0.0 and breakdown['sparse'] == 0.0

    def test_global_sparsity_counts_more_ink(self, tiny_encoder, tiny_decoder):
        data = _data(count=1)
        _, local, _ = loss_and_grads(data.contents, data.masks, data.styles[0], tiny_encoder, tiny_decoder, _cfg())
        _, glob, _ = loss_and_grads(data.contents, data.masks, data.styles[0], tiny_encoder, tiny_decoder,
                                    _cfg(sparsity_mode='global'))
        assert glob['sparse'] > local['sparse']


class TestTrainer:
    def test_loss_log(self, tmp_path):
        path = tmp_path / 'logs' / 'loss.csv'
        checkpoint = train(_cfg(iterations=4), _data(), str(path))
        with open(path, newline='') as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == LOSS_LOG_HEADER
        assert [r[0] for r in rows[1:]] == ['0', '1', '2', '3']
        assert checkpoint.metadata['iteration'] == 4
        assert checkpoint.metadata['seed'] == 7

    def test_same_seed_gives_identical_checkpoints(self):
        a = train(_cfg(), _data())
        b = train(_cfg(), _data())
        assert checkpoint_to_bytes(a) == checkpoint_to_bytes(b)

    def test_different_seed_differs(self):
        a = train(_cfg(seed=1), _data())
        b = train(_cfg(seed=2), _data())
        assert checkpoint_to_bytes(a) != checkpoint_to_bytes(b)

    def test_encoder_is_frozen(self):
        trainer = Trainer(_cfg(), _data())
        before = trainer.encoder.layers[1].kernel.copy()
        checkpoint = trainer.run()
        np.testing.assert_array_equal(checkpoint.encoder.layers[1].kernel, before)

    def test_validation_history(self):
        trainer = Trainer(_cfg(iterations=3, log_every=1, validation_fraction=0.34), _data(count=3))
        trainer.run()
        assert len(trainer.val_idx) == 1
        assert [i for i, _ in trainer.validation_history] == [0, 1, 2]
        assert all(np.isfinite(v) for _, v in trainer.validation_history)


@pytest.mark.slow
class TestTrainingExperiments:
    def test_self_consistency_overfits_one_sketch(self):
        sketch = np.ones((32, 32), dtype=np.float32)
        sketch[8:16, :] = 0.1
        sketch[:, 16:24] = 0.1
        data = TrainingData(sketch[None], np.ones((1, 32, 32)), sketch[None])
        cfg = TrainConfig(use_content=False, use_style=False, use_consist=True, use_sparse=False,
                          iterations=2500, batch_size=1, lr=3e-3, encoder_widths=(8, 16, 32, 64),
                          validation_fraction=0.0, log_every=0, seed=3)
        trainer = Trainer(cfg, data)
        checkpoint = trainer.run()
        start = trainer.history[0].consist
        style = Tensor4.from_image(sketch)
        end = self_consistency_loss(style, checkpoint.encoder, checkpoint.decoder)
        assert end <= 0.1 * start

    def test_sparsity_weight_reduces_ink_in_sparse_regions(self):
        labels = make_face_labels()
        contents = np.stack([make_face_photo(labels, seed=i) for i in range(4)])
        masks = np.stack([derive_sparsity_mask(labels, radius=1)] * 4)
        # 深色底上的白色细线
        styles = np.clip(1.1 - np.stack([make_style_sketch(seed=0), make_style_sketch(period=4, seed=1)]), 0, 1)
        data = TrainingData(contents, masks, styles)
        held_out = make_face_photo(labels, seed=99)
        mask = derive_sparsity_mask(labels, radius=1)
        sketches = {}
        for weight in (0.0, 10.0):
            cfg = _cfg(lambda4=weight, iterations=150, lr=1e-2, encoder_widths=(8, 16, 32, 64), seed=11)
            sketches[weight] = synthesize(held_out, data.styles[0], train(cfg, data))
        assert np.ptp(sketches[0.0]) > 0.05
        sparse_off, protected_off = ink_split(sketches[0.0], mask)
        sparse_on, protected_on = ink_split(sketches[10.0], mask)
        assert sparse_off > 0.1
        assert sparse_on <= 0.75 * sparse_off
        margin = sparse_off - sparse_on
        assert abs(protected_on - protected_off) < 10 * margin
