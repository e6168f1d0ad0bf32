"""稀疏掩码与背景移除"""
from typing import Optional

import numpy as np
from scipy import ndimage

from ..api.exceptions import ParameterError
from .labels import FaceLabel, LabelLike, PROTECTED_LABELS, as_label_map, check_same_shape
from logger import setup_logger

logger = setup_logger(__name__)

# 512 像素分辨率下的零区扩张半径
BASE_DILATION_RADIUS = 3
BASE_RESOLUTION = 512


def default_radius(h: int, w: int) -> int:
    """按分辨率等比缩放的扩张半径"""
    return int(round(BASE_DILATION_RADIUS * max(h, w) / BASE_RESOLUTION))


def disk(radius: int) -> np.ndarray:
    """dy^2 + dx^2 <= r^2 的圆盘结构元素"""
    yy, xx = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    return yy * yy + xx * xx <= radius * radius


def boundary_pixels(ids: np.ndarray) -> np.ndarray:
    """4 邻域中存在不同类别（界内）的像素"""
    boundary = np.zeros(ids.shape, dtype=bool)
    vertical = ids[1:, :] != ids[:-1, :]
    horizontal = ids[:, 1:] != ids[:, :-1]
    boundary[1:, :] |= vertical
    boundary[:-1, :] |= vertical
    boundary[:, 1:] |= horizontal
    boundary[:, :-1] |= horizontal
    return boundary


def remove_background(photo: np.ndarray, labels: LabelLike) -> np.ndarray:
    """背景类像素置白，其余像素不变"""
    label_map = as_label_map(labels)
    photo = np.asarray(photo)
    check_same_shape(photo[..., 0] if photo.ndim == 3 else photo, label_map, 'remove_background')
    out = photo.copy()
    out[label_map.ids == FaceLabel.BACKGROUND] = 1.0 if np.issubdtype(photo.dtype, np.floating) else 255
    logger.debug(
        f"Background removed - pixels: {int((label_map.ids == FaceLabel.BACKGROUND).sum())} - shape: {photo.shape}"
    )
    return out


def derive_sparsity_mask(labels: LabelLike, radius: Optional[int] = None) -> np.ndarray:
    """由解析标签推导稀疏掩码 M'

    零区 = 受保护类别（眼、眉、唇）并上类别边界像素，再以半径 radius 的圆盘膨胀；
    其余为 1。radius 为空时按分辨率缩放默认值，0 表示不膨胀。

    Returns:
        (h, w) uint8 掩码，1 = 鼓励稀疏，0 = 保护
    """
    label_map = as_label_map(labels)
    ids = label_map.ids
    if radius is None:
        radius = default_radius(*ids.shape)
    if radius < 0:
        raise ParameterError(f"dilation radius must be >= 0, got {radius}")
    zeros = label_map.region(PROTECTED_LABELS) | boundary_pixels(ids)
    if radius > 0 and zeros.any():
        zeros = ndimage.binary_dilation(zeros, structure=disk(radius))
    mask = (~zeros).astype(np.uint8)
    logger.debug(
        f"Sparsity mask derived - shape: {ids.shape} - radius: {radius} - protected_fraction: {zeros.mean():.4f}"
    )
    return mask


def global_sparsity_mask(labels: LabelLike) -> np.ndarray:
    """全局稀疏：全 1 掩码"""
    return np.ones(as_label_map(labels).shape, dtype=np.uint8)
