import struct

import numpy as np
import pytest

from penportrait.api.exceptions import FormatError
from penportrait.net.checkpoint import (
    CHECKPOINT_VERSION,
    MAGIC,
    Checkpoint,
    checkpoint_from_bytes,
    checkpoint_to_bytes,
    load_checkpoint,
    save_checkpoint,
)
from penportrait.net.synthesis import synthesize


class TestCheckpointBytes:
    def test_prefix(self, tiny_checkpoint):
        payload = checkpoint_to_bytes(tiny_checkpoint)
        magic, version, _ = struct.unpack_from('<4sII', payload)
        assert magic == MAGIC
        assert version == CHECKPOINT_VERSION

    def test_reload_restores_weights(self, tiny_checkpoint):
        restored = checkpoint_from_bytes(checkpoint_to_bytes(tiny_checkpoint))
        assert restored.metadata == tiny_checkpoint.metadata
        assert restored.encoder.taps == tiny_checkpoint.encoder.taps
        for a, b in zip(restored.decoder.layers, tiny_checkpoint.decoder.layers):
            assert a.kind is b.kind and a.stride == b.stride and a.pad == b.pad
            if a.kernel is not None:
                np.testing.assert_array_equal(a.kernel, b.kernel)
                np.testing.assert_array_equal(a.bias, b.bias)

    def test_deterministic(self, tiny_checkpoint):
        assert checkpoint_to_bytes(tiny_checkpoint) == checkpoint_to_bytes(tiny_checkpoint)

    def test_bad_magic(self, tiny_checkpoint):
        payload = b'XXXX' + checkpoint_to_bytes(tiny_checkpoint)[4:]
        with pytest.raises(FormatError):
            checkpoint_from_bytes(payload)

    def test_version_mismatch(self, tiny_checkpoint):
        payload = bytearray(checkpoint_to_bytes(tiny_checkpoint))
        struct.pack_into('<I', payload, 4, CHECKPOINT_VERSION + 1)
        with pytest.raises(FormatError, match='version'):
            checkpoint_from_bytes(bytes(payload))

    def test_truncated(self, tiny_checkpoint):
        payload = checkpoint_to_bytes(tiny_checkpoint)
        with pytest.raises(FormatError):
            checkpoint_from_bytes(payload[:-4])

    def test_trailing_bytes(self, tiny_checkpoint):
        with pytest.raises(FormatError):
            checkpoint_from_bytes(checkpoint_to_bytes(tiny_checkpoint) + b'\0\0\0\0')

    def test_too_short(self):
        with pytest.raises(FormatError):
            checkpoint_from_bytes(b'PP')


class TestCheckpointFile:
    def test_reload_reproduces_synthesis(self, tiny_checkpoint, face_photo, style_sketch, tmp_path):
        path = save_checkpoint(tiny_checkpoint, str(tmp_path / 'model.ppck'))
        restored = load_checkpoint(path)
        np.testing.assert_array_equal(
            synthesize(face_photo, style_sketch, restored),
            synthesize(face_photo, style_sketch, tiny_checkpoint),
        )

    def test_version_checked_at_synthesis(self, tiny_checkpoint, face_photo, style_sketch):
        stale = Checkpoint(tiny_checkpoint.encoder, tiny_checkpoint.decoder, version=CHECKPOINT_VERSION + 1)
        with pytest.raises(FormatError):
            synthesize(face_photo, style_sketch, stale)
