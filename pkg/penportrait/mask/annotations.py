"""人脸标注：眼睛中心与局部眉毛补丁

清单为 INI 文件，路径相对清单所在目录：

    [eyes]
    left = 41, 30
    right = 23, 30

    [eyebrow.left]
    patch = brows/left.png
    x = 36
    y = 20
"""
import configparser
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..api.exceptions import DataError, ConfigError
from ..utils.file_utils import load_gray_png
from logger import setup_logger

logger = setup_logger(__name__)

Point = Tuple[int, int]


@dataclass(frozen=True)
class EyebrowPatch:
    """局部合成的眉毛二值补丁，左上角放在 (x, y)"""
    image: np.ndarray
    x: int
    y: int

    @property
    def rect(self) -> Tuple[int, int, int, int]:
        """(x, y, 宽, 高)"""
        h, w = self.image.shape
        return self.x, self.y, w, h


@dataclass
class FaceAnnotations:
    """眼睛中心 (x = 列, y = 行) 与眉毛补丁，都可缺省"""
    left_eye: Optional[Point] = None
    right_eye: Optional[Point] = None
    eyebrow_patches: List[EyebrowPatch] = field(default_factory=list)

    @property
    def eye_centers(self) -> List[Point]:
        return [p for p in (self.left_eye, self.right_eye) if p is not None]

    def validate(self, h: int, w: int) -> 'FaceAnnotations':
        """检查坐标与补丁矩形均在图像范围内"""
        for x, y in self.eye_centers:
            if not (0 <= x < w and 0 <= y < h):
                raise DataError(f"eye center ({x}, {y}) outside image bounds ({w}x{h})", field='eyes')
        for patch in self.eyebrow_patches:
            x, y, pw, ph = patch.rect
            if x < 0 or y < 0 or x + pw > w or y + ph > h:
                raise DataError(
                    f"eyebrow patch rect {patch.rect} outside image bounds ({w}x{h})", field='eyebrow'
                )
        return self


def _parse_point(raw: str, key: str) -> Point:
    try:
        x, y = (int(v.strip()) for v in raw.split(','))
    except ValueError:
        raise ConfigError(f"annotation '{key}' must be 'x, y', got '{raw}'", field=key)
    return x, y


def load_annotations(path: str) -> FaceAnnotations:
    """读取标注清单；补丁图像读入后二值化"""
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding='utf-8'):
        raise ConfigError(f"annotations manifest not found: {path}", field='annotations')
    base = os.path.dirname(os.path.abspath(path))
    annotations = FaceAnnotations()
    if parser.has_section('eyes'):
        if parser.has_option('eyes', 'left'):
            annotations.left_eye = _parse_point(parser.get('eyes', 'left'), 'eyes.left')
        if parser.has_option('eyes', 'right'):
            annotations.right_eye = _parse_point(parser.get('eyes', 'right'), 'eyes.right')
    for section in sorted(s for s in parser.sections() if s.startswith('eyebrow')):
        try:
            patch_path = os.path.join(base, parser.get(section, 'patch'))
            x = parser.getint(section, 'x')
            y = parser.getint(section, 'y')
        except (configparser.Error, ValueError) as e:
            raise ConfigError(f"invalid eyebrow section [{section}]: {e}", field=section)
        if not os.path.exists(patch_path):
            raise ConfigError(f"eyebrow patch not found: {patch_path}", field=section)
        image = (load_gray_png(patch_path) >= 0.5).astype(np.float32)
        annotations.eyebrow_patches.append(EyebrowPatch(image, x, y))
    logger.debug(
        f"Annotations loaded - path: {path} - eyes: {annotations.eye_centers} - "
        f"eyebrow_patches: {len(annotations.eyebrow_patches)}"
    )
    return annotations
