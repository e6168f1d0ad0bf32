"""检查点读写模块

文件布局：
    b"PPCK" | uint32 LE 版本 | uint32 LE 头部长度 | JSON 头部 (UTF-8, 键排序) |
    按层顺序的 float32 LE 权重块（先编码器后解码器，每个卷积先 kernel 后 bias）
"""
import json
import os
import struct
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from ..nn.layers import LayerKind, LayerSpec
from ..api.exceptions import FormatError, ParameterError, ShapeError
from .network import EncoderConfig, DecoderConfig
from logger import setup_logger

logger = setup_logger(__name__)

MAGIC = b"PPCK"
CHECKPOINT_VERSION = 1
_PREFIX = struct.Struct('<4sII')
_BLOB_DTYPE = np.dtype('<f4')


@dataclass
class Checkpoint:
    """检查点：编码器与解码器配置及权重、训练元数据"""
    encoder: EncoderConfig
    decoder: DecoderConfig
    metadata: Dict[str, Any] = field(default_factory=dict)
    version: int = CHECKPOINT_VERSION

    def to_dict(self) -> Dict[str, Any]:
        """头部清单（不含权重）"""
        return {
            'version': self.version,
            'encoder': {
                'layers': _layer_manifest(self.encoder.layers),
                'taps': list(self.encoder.taps),
                'tap_names': list(self.encoder.tap_names),
            },
            'decoder': {'layers': _layer_manifest(self.decoder.layers)},
            'metadata': self.metadata,
        }


def _layer_manifest(layers) -> List[Dict[str, Any]]:
    manifest = []
    for layer in layers:
        entry: Dict[str, Any] = {'kind': layer.kind.value, 'stride': layer.stride, 'pad': layer.pad}
        if layer.kind is LayerKind.CONV2D:
            entry['kernel_shape'] = list(layer.kernel.shape)
        manifest.append(entry)
    return manifest


def _conv_blobs(layers) -> List[np.ndarray]:
    blobs = []
    for layer in layers:
        if layer.kind is LayerKind.CONV2D:
            blobs.append(layer.kernel)
            blobs.append(layer.bias)
    return blobs


def checkpoint_to_bytes(checkpoint: Checkpoint) -> bytes:
    header = json.dumps(checkpoint.to_dict(), sort_keys=True, separators=(',', ':')).encode('utf-8')
    parts = [_PREFIX.pack(MAGIC, checkpoint.version, len(header)), header]
    for blob in _conv_blobs(checkpoint.encoder.layers) + _conv_blobs(checkpoint.decoder.layers):
        parts.append(np.ascontiguousarray(blob, dtype=_BLOB_DTYPE).tobytes())
    return b''.join(parts)


class _BlobReader:
    def __init__(self, payload: bytes, offset: int):
        self._payload = payload
        self._offset = offset

    def take(self, shape: Tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape))
        end = self._offset + count * _BLOB_DTYPE.itemsize
        if end > len(self._payload):
            raise FormatError(f"checkpoint truncated - needed bytes: {end} - available: {len(self._payload)}")
        array = np.frombuffer(self._payload, dtype=_BLOB_DTYPE, count=count, offset=self._offset)
        self._offset = end
        return array.reshape(shape).astype(np.float32)

    @property
    def remaining(self) -> int:
        return len(self._payload) - self._offset


def _rebuild_layers(manifest: List[Dict[str, Any]], reader: _BlobReader) -> Tuple[LayerSpec, ...]:
    layers = []
    for entry in manifest:
        kind = LayerKind(entry['kind'])
        if kind is LayerKind.CONV2D:
            shape = tuple(entry['kernel_shape'])
            kernel = reader.take(shape)
            bias = reader.take((shape[0],))
            layers.append(LayerSpec(kind, kernel, bias, stride=entry['stride'], pad=entry['pad']))
        else:
            layers.append(LayerSpec(kind, stride=entry['stride'], pad=entry['pad']))
    return tuple(layers)


def checkpoint_from_bytes(payload: bytes) -> Checkpoint:
    """解析检查点字节串

    Raises:
        FormatError: 魔数、版本、头部或权重长度不符
    """
    if len(payload) < _PREFIX.size:
        raise FormatError("checkpoint too short for header prefix")
    magic, version, header_len = _PREFIX.unpack_from(payload)
    if magic != MAGIC:
        raise FormatError(f"bad checkpoint magic: {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"checkpoint version mismatch - found: {version} - expected: {CHECKPOINT_VERSION}")
    header_end = _PREFIX.size + header_len
    if header_end > len(payload):
        raise FormatError("checkpoint header truncated")
    try:
        header = json.loads(payload[_PREFIX.size:header_end].decode('utf-8'))
        reader = _BlobReader(payload, header_end)
        encoder = EncoderConfig(
            _rebuild_layers(header['encoder']['layers'], reader),
            tuple(header['encoder']['taps']),
            tuple(header['encoder']['tap_names']),
        )
        decoder = DecoderConfig(_rebuild_layers(header['decoder']['layers'], reader))
    except FormatError:
        raise
    except (KeyError, ValueError, TypeError, ParameterError, ShapeError) as e:
        raise FormatError(f"invalid checkpoint header: {e}")
    if reader.remaining:
        raise FormatError(f"checkpoint has {reader.remaining} trailing bytes")
    return Checkpoint(encoder, decoder, header.get('metadata', {}), version)


def save_checkpoint(checkpoint: Checkpoint, path: str) -> str:
    """写入检查点文件，返回路径"""
    payload = checkpoint_to_bytes(checkpoint)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(payload)
    logger.info(f"Checkpoint saved - path: {path} - bytes: {len(payload)}")
    return path


def load_checkpoint(path: str) -> Checkpoint:
    with open(path, 'rb') as f:
        payload = f.read()
    checkpoint = checkpoint_from_bytes(payload)
    logger.debug(f"Checkpoint loaded - path: {path} - metadata: {checkpoint.metadata}")
    return checkpoint
