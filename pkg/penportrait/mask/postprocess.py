"""素描后处理：二值化、眉毛融合、眼球补点、头发风格融合"""
from typing import Optional

import numpy as np
from scipy import ndimage

from ..api.exceptions import DataError, ParameterError
from .annotations import FaceAnnotations
from .labels import (
    EYEBROW_LABELS,
    HAIR_LABELS,
    LabelLike,
    as_label_map,
    check_same_shape,
    require_binary,
    require_grayscale,
)
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_THRESHOLD = 0.5
DEFAULT_CHECK_RADIUS = 2
# 黑点半径占图像高度的比例
SPOT_RADIUS_RATIO = 0.015


def binarize(sketch: np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """value >= threshold 为白 (1)，否则为墨 (0)；恰好等于阈值的像素取白"""
    sketch = require_grayscale(sketch, 'binarize')
    return (sketch >= threshold).astype(np.float32)


def thin_ink(sketch: np.ndarray, iterations: int = 1) -> np.ndarray:
    """用 3x3 结构元素膨胀白色区域 iterations 次，使墨线变细"""
    sketch = require_binary(sketch, 'thin_ink')
    if iterations < 0:
        raise ParameterError(f"thin_ink iterations must be >= 0, got {iterations}")
    if iterations == 0:
        return sketch.copy()
    white = ndimage.binary_dilation(sketch == 1, structure=np.ones((3, 3), dtype=bool), iterations=iterations)
    return white.astype(np.float32)


def fuse_eyebrows(global_sketch: np.ndarray, annotations: Optional[FaceAnnotations], labels: LabelLike,
                  thin_iterations: int = 1) -> np.ndarray:
    """用细化后的局部眉毛补丁替换眉毛类像素

    只替换同时落在眉毛标签与某个补丁矩形内的像素，其余像素与输入逐位相同。
    没有补丁时原样返回并记录警告。
    """
    sketch = require_binary(global_sketch, 'fuse_eyebrows')
    label_map = as_label_map(labels)
    check_same_shape(sketch, label_map, 'fuse_eyebrows')
    if annotations is None or not annotations.eyebrow_patches:
        logger.warning("Eyebrow fusion skipped - reason: no eyebrow patches")
        return sketch
    h, w = sketch.shape
    annotations.validate(h, w)

    canvas = np.ones_like(sketch)
    covered = np.zeros(sketch.shape, dtype=bool)
    for patch in annotations.eyebrow_patches:
        x, y, pw, ph = patch.rect
        canvas[y:y + ph, x:x + pw] = require_binary(patch.image, 'eyebrow patch')
        covered[y:y + ph, x:x + pw] = True
    canvas = thin_ink(canvas, thin_iterations)

    region = label_map.region(EYEBROW_LABELS) & covered
    out = sketch.copy()
    out[region] = canvas[region]
    logger.debug(
        f"Eyebrows fused - patches: {len(annotations.eyebrow_patches)} - replaced_pixels: {int(region.sum())}"
    )
    return out


def _disk_mask(shape, cx: int, cy: int, radius: int) -> np.ndarray:
    yy, xx = np.ogrid[:shape[0], :shape[1]]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius * radius


def default_spot_radius(h: int) -> int:
    return max(1, int(round(SPOT_RADIUS_RATIO * h)))


def renew_eyeballs(sketch: np.ndarray, annotations: Optional[FaceAnnotations],
                   check_radius: int = DEFAULT_CHECK_RADIUS, spot_radius: Optional[int] = None) -> np.ndarray:
    """眼睛中心附近全白时补一个实心黑点

    Args:
        sketch: 二值素描
        annotations: 眼睛中心 (x = 列, y = 行)
        check_radius: 判定空白的圆盘半径
        spot_radius: 黑点半径，默认图像高度的 1.5% 取整
    """
    sketch = require_binary(sketch, 'renew_eyeballs')
    if annotations is None or not annotations.eye_centers:
        return sketch
    h, w = sketch.shape
    if spot_radius is None:
        spot_radius = default_spot_radius(h)
    if check_radius < 0 or spot_radius < 0:
        raise ParameterError(f"eyeball radii must be >= 0 - check: {check_radius} - spot: {spot_radius}")
    out = sketch.copy()
    for cx, cy in annotations.eye_centers:
        if not (0 <= cx < w and 0 <= cy < h):
            raise DataError(f"eye center ({cx}, {cy}) outside image bounds ({w}x{h})", field='eyes')
        if np.all(out[_disk_mask(out.shape, cx, cy, check_radius)] == 1):
            out[_disk_mask(out.shape, cx, cy, spot_radius)] = 0
            logger.debug(f"Eyeball renewed - center: ({cx}, {cy}) - radius: {spot_radius}")
    return out


def style_fuse_hair(primary_sketch: np.ndarray, hair_sketch: np.ndarray, labels: LabelLike) -> np.ndarray:
    """头发类像素取自 hair_sketch，其余取自 primary_sketch"""
    primary = require_binary(primary_sketch, 'style_fuse_hair')
    hair = require_binary(hair_sketch, 'style_fuse_hair')
    label_map = as_label_map(labels)
    check_same_shape(primary, hair, 'style_fuse_hair')
    check_same_shape(primary, label_map, 'style_fuse_hair')
    region = label_map.region(HAIR_LABELS)
    out = primary.copy()
    out[region] = hair[region]
    logger.debug(f"Hair style fused - hair_pixels: {int(region.sum())}")
    return out
