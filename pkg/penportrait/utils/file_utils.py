"""文件处理工具模块"""
import hashlib
import os
from typing import Iterable, Optional

import numpy as np
from PIL import Image

from ..api.exceptions import DataError
from logger import setup_logger

# 配置日志
logger = setup_logger(__name__)

HASH_CHUNK = 1 << 16


def ensure_dir(path: str) -> str:
    """确保目录存在"""
    if path and not os.path.exists(path):
        os.makedirs(path, exist_ok=True)
        logger.debug(f"Directory created: {path}")
    return path


def load_gray_png(path: str) -> np.ndarray:
    """
    读取图像为灰度 float32，取值 [0, 1]
    彩色图按 ITU-R 601 亮度转换
    """
    try:
        with Image.open(path) as image:
            gray = image.convert('L')
            array = np.asarray(gray, dtype=np.float32) / 255.0
    except FileNotFoundError:
        raise
    except OSError as e:
        raise DataError(f"cannot read image {path}: {e}", field=path)
    logger.debug(f"Image loaded - path: {path} - shape: {array.shape}")
    return array


def load_label_png(path: str) -> np.ndarray:
    """读取 8 位单通道类别图"""
    try:
        with Image.open(path) as image:
            if image.mode not in ('L', 'P', 'I', 'I;16'):
                raise DataError(f"label map must be single-channel, got mode {image.mode}", field=path)
            ids = np.array(image, dtype=np.int64)
    except FileNotFoundError:
        raise
    except OSError as e:
        raise DataError(f"cannot read label map {path}: {e}", field=path)
    return ids


def save_gray_png(path: str, image: np.ndarray) -> str:
    """把 [0, 1] 灰度图写为 8 位 PNG"""
    array = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    pixels = np.round(array * 255.0).astype(np.uint8)
    ensure_dir(os.path.dirname(path))
    Image.fromarray(pixels).save(path, format='PNG')
    logger.info(f"Image saved - path: {path} - shape: {pixels.shape}", extra={'artifact': os.path.basename(path)})
    return path


def save_label_png(path: str, ids: np.ndarray) -> str:
    ensure_dir(os.path.dirname(path))
    Image.fromarray(np.asarray(ids, dtype=np.uint8)).save(path, format='PNG')
    return path


def write_text(path: str, text: str) -> str:
    """以 UTF-8、\\n 换行写文本"""
    ensure_dir(os.path.dirname(path))
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    logger.info(f"Text artifact saved - path: {path} - chars: {len(text)}", extra={'artifact': os.path.basename(path)})
    return path


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(HASH_CHUNK), b''):
            digest.update(chunk)
    return digest.hexdigest()


def input_namespace(paths: Iterable[Optional[str]], length: int = 12) -> str:
    """
    由输入文件内容生成输出子目录名
    相同输入得到相同名字，不同照片的运行互不覆盖
    """
    digest = hashlib.sha256()
    for path in paths:
        if path:
            digest.update(file_sha256(path).encode('ascii'))
    return digest.hexdigest()[:length]
