"""合成样例数据：人像照片、解析标签、标注清单、风格图与小训练集

生成的目录与 penportrait.ini 中的相对路径一一对应，
可直接用于 train / sketch / plot / run。
"""
import os
from typing import Dict, Tuple

import numpy as np

from ..api.exceptions import ConfigError
from ..mask.labels import FaceLabel
from ..utils.file_utils import save_gray_png, save_label_png, write_text
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_FIXTURE_SIZE = 64
TRAIN_SAMPLES = 2

# 各类别的照片灰度
SHADES = {
    FaceLabel.BACKGROUND: 0.55, FaceLabel.SKIN: 0.8, FaceLabel.HAIR: 0.15,
    FaceLabel.L_BROW: 0.2, FaceLabel.R_BROW: 0.2, FaceLabel.L_EYE: 0.1, FaceLabel.R_EYE: 0.1,
    FaceLabel.U_LIP: 0.45, FaceLabel.L_LIP: 0.45,
}


def make_face_labels(h: int = 32, w: int = 32) -> np.ndarray:
    """椭圆脸、顶部头发、两眉两眼与嘴唇的合成标签图"""
    ids = np.zeros((h, w), dtype=np.int64)
    yy, xx = np.mgrid[:h, :w]
    cy, cx = h / 2, w / 2
    face = ((yy - cy) / (0.42 * h)) ** 2 + ((xx - cx) / (0.34 * w)) ** 2 <= 1
    ids[face] = FaceLabel.SKIN
    ids[(yy < 0.22 * h) & face] = FaceLabel.HAIR
    ids[(yy < 0.1 * h) & (xx > 0.2 * w) & (xx < 0.8 * w)] = FaceLabel.HAIR

    def box(label, top, bottom, left, right):
        ids[int(top * h):int(bottom * h), int(left * w):int(right * w)] = label

    box(FaceLabel.L_BROW, 0.30, 0.35, 0.28, 0.44)
    box(FaceLabel.R_BROW, 0.30, 0.35, 0.56, 0.72)
    box(FaceLabel.L_EYE, 0.38, 0.47, 0.30, 0.42)
    box(FaceLabel.R_EYE, 0.38, 0.47, 0.58, 0.70)
    box(FaceLabel.U_LIP, 0.68, 0.72, 0.40, 0.60)
    box(FaceLabel.L_LIP, 0.72, 0.76, 0.40, 0.60)
    return ids


def make_face_photo(labels: np.ndarray, seed: int = 0) -> np.ndarray:
    """按类别着色并叠加少量噪声的灰度照片"""
    photo = np.full(labels.shape, 0.6, dtype=np.float32)
    for label, value in SHADES.items():
        photo[labels == label] = value
    rng = np.random.default_rng(seed)
    photo += rng.normal(0, 0.03, size=photo.shape).astype(np.float32)
    return np.clip(photo, 0, 1).astype(np.float32)


def make_style_sketch(h: int = 32, w: int = 32, period: int = 6, seed: int = 0) -> np.ndarray:
    """白底上的斜向细线条，模拟线描风格图"""
    yy, xx = np.mgrid[:h, :w]
    sketch = np.ones((h, w), dtype=np.float32)
    sketch[(xx + yy + seed) % period == 0] = 0.1
    return sketch


def label_center(labels: np.ndarray, label: int) -> Tuple[int, int]:
    """类别像素质心 (x = 列, y = 行)"""
    rows, cols = np.nonzero(labels == label)
    return int(round(cols.mean())), int(round(rows.mean()))


def make_eyebrow_patch(labels: np.ndarray, label: int) -> Tuple[np.ndarray, int, int]:
    """覆盖眉毛类别外接矩形（外扩 1 像素）的补丁，中间一行为墨

    Returns:
        (补丁图像, 左上角 x, 左上角 y)
    """
    rows, cols = np.nonzero(labels == label)
    h, w = labels.shape
    top, left = max(int(rows.min()) - 1, 0), max(int(cols.min()) - 1, 0)
    bottom, right = min(int(rows.max()) + 2, h), min(int(cols.max()) + 2, w)
    patch = np.ones((bottom - top, right - left), dtype=np.float32)
    patch[(int(rows.min()) + int(rows.max())) // 2 - top, 1:-1] = 0
    return patch, left, top


def annotations_text(labels: np.ndarray) -> str:
    left_x, left_y = label_center(labels, FaceLabel.L_EYE)
    right_x, right_y = label_center(labels, FaceLabel.R_EYE)
    lines = [
        "; 眼睛中心与眉毛补丁，坐标为 (x = 列, y = 行)",
        "[eyes]",
        f"left = {left_x}, {left_y}",
        f"right = {right_x}, {right_y}",
    ]
    for side, label in (('left', FaceLabel.L_BROW), ('right', FaceLabel.R_BROW)):
        _, x, y = make_eyebrow_patch(labels, label)
        lines += ["", f"[eyebrow.{side}]", f"patch = brow_{side}.png", f"x = {x}", f"y = {y}"]
    return "\n".join(lines) + "\n"


def write_fixture(root: str, size: int = DEFAULT_FIXTURE_SIZE, seed: int = 0) -> Dict[str, str]:
    """在 root 下写出整套样例输入，返回 名称 -> 路径"""
    if size < 16 or size % 8:
        raise ConfigError(f"fixture size must be a multiple of 8 and at least 16, got {size}", field='size')
    labels = make_face_labels(size, size)
    files = {
        'photo': save_gray_png(os.path.join(root, 'photo.png'), make_face_photo(labels, seed=seed)),
        'labels': save_label_png(os.path.join(root, 'labels.png'), labels),
        'style_a': save_gray_png(os.path.join(root, 'style_a.png'), make_style_sketch(size, size, seed=seed)),
        'style_b': save_gray_png(os.path.join(root, 'style_b.png'),
                                 make_style_sketch(size, size, period=4, seed=seed + 1)),
    }
    for side, label in (('left', FaceLabel.L_BROW), ('right', FaceLabel.R_BROW)):
        patch, _, _ = make_eyebrow_patch(labels, label)
        files[f'brow_{side}'] = save_gray_png(os.path.join(root, f'brow_{side}.png'), patch)
    files['annotations'] = write_text(os.path.join(root, 'annotations.ini'), annotations_text(labels))
    for i in range(TRAIN_SAMPLES):
        train_photo = make_face_photo(labels, seed=seed + 100 + i)
        files[f'train_photo_{i}'] = save_gray_png(os.path.join(root, 'train', f'photo_{i:03d}.png'), train_photo)
        files[f'train_labels_{i}'] = save_label_png(os.path.join(root, 'train', f'labels_{i:03d}.png'), labels)
    logger.info(f"Fixture written - root: {root} - size: {size} - seed: {seed} - files: {len(files)}")
    return files
