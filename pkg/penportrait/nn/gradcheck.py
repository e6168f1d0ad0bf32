"""有限差分梯度检验工具"""
from typing import Callable, Iterable, Optional, Tuple

import numpy as np


def numerical_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-3,
                       indices: Optional[Iterable[Tuple[int, ...]]] = None) -> np.ndarray:
    """中心差分 (f(x+h) - f(x-h)) / 2h；indices 为空时遍历全部元素

    x 按 float64 复制后扰动，原数组不被修改。
    """
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    if indices is None:
        indices = np.ndindex(*x.shape)
    for idx in indices:
        original = x[idx]
        x[idx] = original + h
        f_plus = f(x)
        x[idx] = original - h
        f_minus = f(x)
        x[idx] = original
        grad[idx] = (f_plus - f_minus) / (2 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / (||a|| + ||n||)，两者都为零时返回 0"""
    a = np.asarray(analytic, dtype=np.float64).ravel()
    n = np.asarray(numeric, dtype=np.float64).ravel()
    denom = np.linalg.norm(a) + np.linalg.norm(n)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(a - n) / denom)
