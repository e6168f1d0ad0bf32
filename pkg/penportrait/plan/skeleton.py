"""骨架提取模块（Zhang-Suen 细化）"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..mask.labels import ink_mask, require_binary
from logger import setup_logger

logger = setup_logger(__name__)

_EIGHT = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]], dtype=np.int32)


def neighbor_count(pixels: np.ndarray) -> np.ndarray:
    """每个像素的 8 邻域前景数（界外视为背景）"""
    return ndimage.convolve(pixels.astype(np.int32), _EIGHT, mode='constant', cval=0)


def full_blocks(pixels: np.ndarray) -> np.ndarray:
    """(h-1, w-1) 布尔图，True 表示以该点为左上角的 2x2 块全为前景"""
    p = pixels.astype(bool)
    return p[:-1, :-1] & p[:-1, 1:] & p[1:, :-1] & p[1:, 1:]


@dataclass(frozen=True)
class Skeleton:
    """单像素宽骨架，pixels 中 True 为骨架墨点"""
    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'pixels', np.asarray(self.pixels, dtype=bool))

    @property
    def shape(self):
        return self.pixels.shape

    @property
    def count(self) -> int:
        return int(self.pixels.sum())

    @property
    def endpoints(self) -> np.ndarray:
        """邻居数不超过 1 的骨架点 (行, 列)"""
        return np.argwhere(self.pixels & (neighbor_count(self.pixels) <= 1))

    @property
    def branch_points(self) -> np.ndarray:
        """邻居数不少于 3 的骨架点 (行, 列)"""
        return np.argwhere(self.pixels & (neighbor_count(self.pixels) >= 3))

    def is_thin(self) -> bool:
        return not full_blocks(self.pixels).any()


def _neighbors(img: np.ndarray):
    """按 P2..P9（北起顺时针）返回邻域平移图"""
    p = np.pad(img, 1)
    h, w = img.shape
    shift = lambda dy, dx: p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return [shift(-1, 0), shift(-1, 1), shift(0, 1), shift(1, 1),
            shift(1, 0), shift(1, -1), shift(0, -1), shift(-1, -1)]


def _subiteration(img: np.ndarray, first: bool) -> np.ndarray:
    p2, p3, p4, p5, p6, p7, p8, p9 = _neighbors(img)
    ring = [p2, p3, p4, p5, p6, p7, p8, p9, p2]
    b = sum(ring[:8])
    a = sum(((ring[k] == 0) & (ring[k + 1] == 1)).astype(np.uint8) for k in range(8))
    if first:
        c = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        c = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    return (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & c


def zhang_suen_thin(foreground: np.ndarray) -> np.ndarray:
    """Zhang-Suen 迭代细化直到不动点；输入前景为 True/1"""
    img = np.asarray(foreground).astype(np.uint8)
    while True:
        changed = False
        for first in (True, False):
            delete = _subiteration(img, first)
            if delete.any():
                img[delete] = 0
                changed = True
        if not changed:
            return img.astype(bool)


def _is_simple(img: np.ndarray, r: int, c: int) -> bool:
    """删除 (r, c) 不会断开局部 8 连通、不会产生空洞、不是端点"""
    window = np.pad(img, 1)[r:r + 3, c:c + 3].copy()
    window[1, 1] = False
    if window.sum() < 2:
        return False
    if window[0, 1] and window[1, 0] and window[1, 2] and window[2, 1]:
        return False
    _, components = ndimage.label(window, structure=np.ones((3, 3), dtype=bool))
    return components == 1


def remove_full_blocks(pixels: np.ndarray) -> np.ndarray:
    """逐个删去 2x2 全前景块中的简单点，直到骨架单像素宽"""
    img = pixels.astype(bool).copy()
    while True:
        blocks = np.argwhere(full_blocks(img))
        if not len(blocks):
            return img
        removed = False
        for r0, c0 in blocks:
            for r, c in ((r0, c0), (r0, c0 + 1), (r0 + 1, c0), (r0 + 1, c0 + 1)):
                if img[r, c] and _is_simple(img, r, c):
                    img[r, c] = False
                    removed = True
                    break
        if not removed:
            return img


def restore_lost_components(foreground: np.ndarray, thinned: np.ndarray) -> np.ndarray:
    """细化后整块消失的 8 连通分量，保留离其质心最近的一个像素"""
    labels, count = ndimage.label(foreground, structure=np.ones((3, 3), dtype=bool))
    if not count:
        return thinned
    kept = np.bincount(labels[thinned], minlength=count + 1)
    lost = [k for k in range(1, count + 1) if not kept[k]]
    if not lost:
        return thinned
    restored = thinned.copy()
    for k in lost:
        pixels = np.argwhere(labels == k)
        offsets = pixels - pixels.mean(axis=0)
        r, c = pixels[int(np.argmin((offsets ** 2).sum(axis=1)))]
        restored[r, c] = True
    logger.debug(f"Restored lost components - components: {count} - restored: {len(lost)}")
    return restored


def skeletonize(sketch: np.ndarray) -> Skeleton:
    """二值素描（墨 = 0）转前景后做 Zhang-Suen 细化，再清除残留的 2x2 块

    细化中整块消失的小分量（如 2x2 墨点）各保留一个像素，分量数不变。
    """
    sketch = require_binary(sketch, 'skeletonize')
    foreground = ink_mask(sketch)
    thinned = restore_lost_components(foreground, remove_full_blocks(zhang_suen_thin(foreground)))
    skeleton = Skeleton(thinned)
    logger.debug(f"Skeletonized - ink_pixels: {int(foreground.sum())} - skeleton_pixels: {skeleton.count}")
    return skeleton
