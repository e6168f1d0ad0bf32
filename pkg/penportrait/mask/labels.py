"""人脸解析标签与素描栅格类型"""
from dataclasses import dataclass
from enum import IntEnum
from typing import FrozenSet, Union

import numpy as np

from ..api.exceptions import DataError, ShapeError, UsageError

NUM_CLASSES = 19


class FaceLabel(IntEnum):
    """19 类人脸解析标签（0 背景 ... 17 头发, 18 帽子）"""
    BACKGROUND = 0
    SKIN = 1
    L_BROW = 2
    R_BROW = 3
    L_EYE = 4
    R_EYE = 5
    EYE_GLASSES = 6
    L_EAR = 7
    R_EAR = 8
    EAR_RING = 9
    NOSE = 10
    MOUTH = 11
    U_LIP = 12
    L_LIP = 13
    NECK = 14
    NECKLACE = 15
    CLOTH = 16
    HAIR = 17
    HAT = 18


EYEBROW_LABELS: FrozenSet[int] = frozenset({FaceLabel.L_BROW, FaceLabel.R_BROW})
EYE_LABELS: FrozenSet[int] = frozenset({FaceLabel.L_EYE, FaceLabel.R_EYE})
LIP_LABELS: FrozenSet[int] = frozenset({FaceLabel.MOUTH, FaceLabel.U_LIP, FaceLabel.L_LIP})
# 稀疏掩码中恒为 0 的类别
PROTECTED_LABELS: FrozenSet[int] = EYEBROW_LABELS | EYE_LABELS | LIP_LABELS
# 允许实心填充的类别
FILL_LABELS: FrozenSet[int] = EYEBROW_LABELS | EYE_LABELS
HAIR_LABELS: FrozenSet[int] = frozenset({FaceLabel.HAIR})


@dataclass(frozen=True)
class LabelMap:
    """(h, w) 逐像素类别 id"""
    ids: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids)
        if ids.ndim != 2:
            raise ShapeError(f"label map must be 2-D, got shape {ids.shape}")
        if not np.issubdtype(ids.dtype, np.integer):
            if not np.array_equal(ids, np.round(ids)):
                raise DataError("label map contains non-integer ids")
        ids = ids.astype(np.int64)
        bad = np.unique(ids[(ids < 0) | (ids >= NUM_CLASSES)])
        if bad.size:
            raise DataError(f"label map contains unknown ids: {bad.tolist()}")
        object.__setattr__(self, 'ids', ids)

    @property
    def shape(self):
        return self.ids.shape

    def region(self, labels) -> np.ndarray:
        """属于给定类别集合的布尔掩码"""
        return np.isin(self.ids, list(labels))


LabelLike = Union[LabelMap, np.ndarray]


def as_label_map(labels: LabelLike) -> LabelMap:
    return labels if isinstance(labels, LabelMap) else LabelMap(labels)


def check_same_shape(a: np.ndarray, b, what: str) -> None:
    shape_b = b.shape
    if a.shape != shape_b:
        raise ShapeError(f"{what} dims mismatch - left: {a.shape} - right: {shape_b}")


def is_binary(sketch: np.ndarray) -> bool:
    return bool(np.isin(np.asarray(sketch), (0, 1)).all())


def require_binary(sketch: np.ndarray, what: str) -> np.ndarray:
    """校验二值素描 (1 = 白纸, 0 = 墨)，返回 float32 副本"""
    sketch = np.asarray(sketch)
    if sketch.ndim != 2:
        raise ShapeError(f"{what} expects a 2-D sketch, got shape {sketch.shape}")
    if not is_binary(sketch):
        raise UsageError(f"{what} expects a binary sketch (values 0/1)")
    return sketch.astype(np.float32)


def require_grayscale(sketch: np.ndarray, what: str) -> np.ndarray:
    sketch = np.asarray(sketch, dtype=np.float32)
    if sketch.ndim != 2:
        raise ShapeError(f"{what} expects a 2-D sketch, got shape {sketch.shape}")
    if sketch.size and (sketch.min() < 0 or sketch.max() > 1 or not np.isfinite(sketch).all()):
        raise DataError(f"{what} expects values in [0, 1]")
    return sketch


def ink_mask(sketch: np.ndarray) -> np.ndarray:
    """墨像素（值 0）为 True"""
    return np.asarray(sketch) < 0.5
