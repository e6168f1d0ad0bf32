"""推理模块：单次前向合成素描，以及墨量统计"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..nn.tensor import Tensor4
from ..api.exceptions import FormatError, ShapeError
from .network import adain, decode, encode
from .checkpoint import Checkpoint, CHECKPOINT_VERSION
from logger import setup_logger

logger = setup_logger(__name__)


def _check_checkpoint(checkpoint: Checkpoint) -> None:
    if checkpoint.version != CHECKPOINT_VERSION:
        raise FormatError(
            f"checkpoint version mismatch - found: {checkpoint.version} - expected: {CHECKPOINT_VERSION}"
        )
    if checkpoint.encoder.out_channels != checkpoint.decoder.in_channels:
        raise FormatError(
            f"checkpoint encoder/decoder mismatch - encoder out: {checkpoint.encoder.out_channels} - "
            f"decoder in: {checkpoint.decoder.in_channels}"
        )


def padded_size(size: int, factor: int) -> int:
    """向上取整到 factor 的倍数，且不小于 2 * factor"""
    return max(-(-size // factor) * factor, 2 * factor)


def pad_white(image: np.ndarray, h: int, w: int) -> np.ndarray:
    """在下方与右侧补白到 (h, w)"""
    return np.pad(image, ((0, h - image.shape[0]), (0, w - image.shape[1])), constant_values=1.0)


def synthesize(photo: np.ndarray, style: np.ndarray, checkpoint: Checkpoint) -> np.ndarray:
    """T(x, s) = g(AdaIN(f(x), f(s)))，返回 (h, w) 灰度素描，取值 [0, 1]

    尺寸不是下采样倍数时补白后计算再裁回原尺寸。

    Args:
        photo: (h, w) 去背景后的灰度照片
        style: (hs, ws) 风格素描
        checkpoint: 训练好的检查点
    """
    _check_checkpoint(checkpoint)
    photo = np.asarray(photo, dtype=np.float32)
    style = np.asarray(style, dtype=np.float32)
    if photo.ndim != 2 or style.ndim != 2:
        raise ShapeError(f"synthesize expects 2-D images - photo: {photo.shape} - style: {style.shape}")
    factor = checkpoint.encoder.downsample_factor
    h, w = photo.shape
    x = pad_white(photo, padded_size(h, factor), padded_size(w, factor))
    s = pad_white(style, padded_size(style.shape[0], factor), padded_size(style.shape[1], factor))

    content_feat, _ = encode(Tensor4.from_image(x), checkpoint.encoder)
    style_feat, _ = encode(Tensor4.from_image(s), checkpoint.encoder)
    out = decode(adain(content_feat, style_feat), checkpoint.decoder)
    sketch = out.data[0, 0, :h, :w].astype(np.float32)
    logger.debug(f"Sketch synthesized - shape: {sketch.shape} - ink_mass: {ink_mass(sketch):.4f}")
    return sketch


def synthesize_candidates(photo: np.ndarray, styles: Sequence[np.ndarray],
                          checkpoint: Checkpoint) -> List[np.ndarray]:
    """每张风格图生成一张候选素描"""
    return [synthesize(photo, style, checkpoint) for style in styles]


def _region(sketch: np.ndarray, region: Optional[np.ndarray]) -> np.ndarray:
    sketch = np.asarray(sketch)
    if region is None:
        return sketch.ravel()
    region = np.asarray(region, dtype=bool)
    if region.shape != sketch.shape:
        raise ShapeError(f"region shape {region.shape} does not match sketch {sketch.shape}")
    return sketch[region]


def ink_fraction(sketch: np.ndarray, region: Optional[np.ndarray] = None, threshold: float = 0.5) -> float:
    """区域内低于阈值（墨）的像素比例；空区域为 0"""
    values = _region(sketch, region)
    if values.size == 0:
        return 0.0
    return float(np.mean(values < threshold))


def ink_mass(sketch: np.ndarray, region: Optional[np.ndarray] = None) -> float:
    """区域内 mean(1 - T)"""
    values = _region(sketch, region)
    if values.size == 0:
        return 0.0
    return float(np.mean(1.0 - values))


def ink_split(sketch: np.ndarray, mask: np.ndarray, threshold: float = 0.5) -> Tuple[float, float]:
    """(M' = 1 区域墨比例, M' = 0 区域墨比例)"""
    mask = np.asarray(mask).astype(bool)
    return ink_fraction(sketch, mask, threshold), ink_fraction(sketch, ~mask, threshold)
