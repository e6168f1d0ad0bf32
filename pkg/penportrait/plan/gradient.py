"""Canny 梯度场：高斯平滑、Sobel 求导、非极大值抑制与滞后阈值"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..mask.labels import require_grayscale
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_SIGMA = 1.0
DEFAULT_LOW_THRESHOLD = 0.1
DEFAULT_HIGH_THRESHOLD = 0.3

# 与梯度方向垂直比较的邻居对
_ALONG_X = np.array([[0, 0, 0], [1, 0, 1], [0, 0, 0]], dtype=bool)
_ALONG_DIAG = np.array([[1, 0, 0], [0, 0, 0], [0, 0, 1]], dtype=bool)
_ALONG_Y = np.array([[0, 1, 0], [0, 0, 0], [0, 1, 0]], dtype=bool)
_ALONG_ANTI = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=bool)


@dataclass(frozen=True)
class GradientField:
    """逐像素梯度方向（弧度，[-pi, pi]，x 向右 y 向下）、幅值与边缘掩码"""
    orientation: np.ndarray
    magnitude: np.ndarray
    edges: np.ndarray

    @property
    def shape(self):
        return self.magnitude.shape

    @classmethod
    def flat(cls, shape) -> 'GradientField':
        """零梯度场"""
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape, dtype=bool))


def canny_gradient(sketch: np.ndarray, sigma: float = DEFAULT_SIGMA,
                   low_threshold: float = DEFAULT_LOW_THRESHOLD,
                   high_threshold: float = DEFAULT_HIGH_THRESHOLD) -> GradientField:
    """计算梯度场

    orientation = atan2(gy, gx)，gx 沿列方向、gy 沿行方向；
    幅值经非极大值抑制与滞后阈值得到 edges。
    """
    image = require_grayscale(sketch, 'canny_gradient').astype(np.float64)
    smoothed = ndimage.gaussian_filter(image, sigma) if sigma > 0 else image
    gx = ndimage.sobel(smoothed, axis=1)
    gy = ndimage.sobel(smoothed, axis=0)
    magnitude = np.hypot(gx, gy)
    orientation = np.arctan2(gy, gx)

    # 方向模 pi 量化为 4 档：0, pi/4, pi/2, 3pi/4
    quantized = np.round(4 * np.mod(orientation, np.pi) / np.pi).astype(int) % 4
    thinned = np.zeros(magnitude.shape, dtype=bool)
    for bin_index, footprint in enumerate((_ALONG_X, _ALONG_DIAG, _ALONG_Y, _ALONG_ANTI)):
        neighbor_max = ndimage.maximum_filter(magnitude, footprint=footprint, mode='constant', cval=0.0)
        thinned |= (quantized == bin_index) & (magnitude >= neighbor_max) & (magnitude > 0)
    thinned_mag = np.where(thinned, magnitude, 0.0)

    high = thinned_mag > high_threshold
    low = thinned_mag > low_threshold
    edges = ndimage.binary_dilation(high, structure=np.ones((3, 3)), iterations=-1, mask=low) if high.any() else high
    logger.debug(
        f"Gradient computed - sigma: {sigma} - max_magnitude: {magnitude.max() if magnitude.size else 0:.4f} - "
        f"edge_pixels: {int(edges.sum())}"
    )
    return GradientField(orientation, magnitude, edges)
