"""实心区域由外向内的环形填充"""
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from ..mask.labels import FILL_LABELS, LabelLike, as_label_map, check_same_shape, ink_mask, require_binary
from .trajectory import Stroke, StrokeKind
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_PEN_WIDTH = 1
_CROSS = ndimage.generate_binary_structure(2, 1)
_SQUARE = np.ones((3, 3), dtype=bool)
# (dy, dx)，北起顺时针
_CLOCKWISE = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def region_thickness(region: np.ndarray) -> int:
    """2 * max(EDT) - 1：区域内能放下的最粗笔画宽度"""
    if not region.any():
        return 0
    edt = ndimage.distance_transform_edt(np.pad(region, 1))
    return int(2 * edt.max() - 1)


def fill_regions(sketch: np.ndarray, labels: LabelLike, pen_width: float = DEFAULT_PEN_WIDTH,
                 fill_labels=FILL_LABELS) -> List[np.ndarray]:
    """眼、眉类别内厚度超过笔宽的墨连通域（8 连通）"""
    sketch = require_binary(sketch, 'plan_fills')
    label_map = as_label_map(labels)
    check_same_shape(sketch, label_map, 'plan_fills')
    candidates = ink_mask(sketch) & label_map.region(fill_labels)
    components, count = ndimage.label(candidates, structure=_SQUARE)
    regions = []
    for index in range(1, count + 1):
        region = components == index
        if region_thickness(region) > pen_width:
            regions.append(region)
    return regions


def peel_rings(region: np.ndarray) -> List[np.ndarray]:
    """逐层剥离 4 邻域边界环，由外向内"""
    rings = []
    remaining = region.astype(bool).copy()
    while remaining.any():
        ring = remaining & ~ndimage.binary_erosion(remaining, structure=_CROSS, border_value=0)
        rings.append(ring)
        remaining &= ~ring
    return rings


def _onward(ring: np.ndarray, r: int, c: int) -> int:
    h, w = ring.shape
    return sum(1 for dy, dx in _CLOCKWISE
               if 0 <= r + dy < h and 0 <= c + dx < w and ring[r + dy, c + dx])


def order_ring(ring: np.ndarray) -> List[List[Tuple[int, int]]]:
    """把一个环排成点列

    从最上最左点出发，每步选后续邻居最少的点（Warnsdorff），
    再优先 4 邻居，最后按北起顺时针；走不通时从剩余点重新起步。

    Returns:
        一个或多个 (x, y) 点列
    """
    unvisited = ring.astype(bool).copy()
    h, w = unvisited.shape
    paths = []
    while unvisited.any():
        r, c = np.argwhere(unvisited)[0]
        path = [(int(c), int(r))]
        unvisited[r, c] = False
        while True:
            options = []
            for order, (dy, dx) in enumerate(_CLOCKWISE):
                nr, nc = r + dy, c + dx
                if 0 <= nr < h and 0 <= nc < w and unvisited[nr, nc]:
                    diagonal = dy != 0 and dx != 0
                    options.append((_onward(unvisited, nr, nc), diagonal, order, nr, nc))
            if not options:
                break
            _, _, _, r, c = min(options)
            path.append((int(c), int(r)))
            unvisited[r, c] = False
        paths.append(path)
    return paths


def plan_fills(sketch: np.ndarray, labels: LabelLike, pen_width: float = DEFAULT_PEN_WIDTH,
               fill_labels=FILL_LABELS) -> List[Stroke]:
    """为眼球、眉毛等实心墨块生成由外向内的环形笔画"""
    strokes: List[Stroke] = []
    for region in fill_regions(sketch, labels, pen_width, fill_labels):
        for ring in peel_rings(region):
            strokes.extend(Stroke(tuple(path), StrokeKind.FILL_LOOP) for path in order_ring(ring))
    logger.debug(f"Fills planned - loops: {len(strokes)} - pen_width: {pen_width}")
    return strokes


def fill_pixels(sketch: np.ndarray, labels: LabelLike, pen_width: float = DEFAULT_PEN_WIDTH,
                fill_labels=FILL_LABELS) -> np.ndarray:
    """所有填充区域的并集"""
    mask = np.zeros(np.asarray(sketch).shape, dtype=bool)
    for region in fill_regions(sketch, labels, pen_width, fill_labels):
        mask |= region
    return mask
