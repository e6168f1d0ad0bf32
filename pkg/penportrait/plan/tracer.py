"""骨架笔画追踪"""
from typing import List, Optional, Tuple

import numpy as np

from ..api.exceptions import ShapeError, UsageError
from .gradient import GradientField
from .skeleton import Skeleton, full_blocks, neighbor_count
from .trajectory import Stroke, StrokeKind
from logger import setup_logger

logger = setup_logger(__name__)

# (dy, dx)，北起顺时针，用作平局时的优先次序
CLOCKWISE = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
DEFAULT_MIN_MAGNITUDE = 1e-6
_TIE_EPS = 1e-9


def check_thin(skeleton: Skeleton) -> None:
    blocks = np.argwhere(full_blocks(skeleton.pixels))
    if len(blocks):
        r, c = blocks[0]
        raise UsageError(
            f"skeleton is not thin - full 2x2 block at rows {r}-{r + 1}, cols {c}-{c + 1}",
            field='skeleton',
        )


def _pick_seed(unvisited: np.ndarray, counts: np.ndarray) -> Tuple[int, int]:
    """光栅序第一个端点；没有端点（闭环）时取最上最左的未访问点"""
    endpoints = np.flatnonzero(unvisited & (counts <= 1))
    flat = endpoints[0] if endpoints.size else np.flatnonzero(unvisited)[0]
    r, c = np.unravel_index(flat, unvisited.shape)
    return int(r), int(c)


class _Walker:
    def __init__(self, skeleton: Skeleton, grad: GradientField, min_magnitude: float):
        self.unvisited = skeleton.pixels.copy()
        self.counts = neighbor_count(self.unvisited)
        self.grad = grad
        self.min_magnitude = min_magnitude
        self.h, self.w = self.unvisited.shape

    def visit(self, r: int, c: int) -> None:
        self.unvisited[r, c] = False
        r0, r1 = max(r - 1, 0), min(r + 2, self.h)
        c0, c1 = max(c - 1, 0), min(c + 2, self.w)
        self.counts[r0:r1, c0:c1] -= 1
        self.counts[r, c] += 1

    def candidates(self, r: int, c: int) -> List[Tuple[int, int]]:
        return [(dy, dx) for dy, dx in CLOCKWISE
                if 0 <= r + dy < self.h and 0 <= c + dx < self.w and self.unvisited[r + dy, c + dx]]

    def choose(self, r: int, c: int, options: List[Tuple[int, int]],
               previous: Optional[Tuple[int, int]]) -> Tuple[int, int]:
        """梯度足够时取与切线（梯度方向转 90 度）最共线的方向，否则沿上一步方向"""
        if len(options) == 1:
            return options[0]
        if self.grad.magnitude[r, c] >= self.min_magnitude:
            theta = self.grad.orientation[r, c] + np.pi / 2
            reference, absolute = (np.sin(theta), np.cos(theta)), True
        elif previous is not None:
            reference, absolute = previous, False
        else:
            return options[0]
        ref_norm = np.hypot(*reference)
        best, best_score = options[0], -np.inf
        for dy, dx in options:
            score = (dy * reference[0] + dx * reference[1]) / (np.hypot(dy, dx) * ref_norm)
            if absolute:
                score = abs(score)
            if score > best_score + _TIE_EPS:
                best, best_score = (dy, dx), score
        return best

    def walk(self) -> Stroke:
        r, c = _pick_seed(self.unvisited, self.counts)
        path = [(c, r)]
        self.visit(r, c)
        previous = None
        while True:
            options = self.candidates(r, c)
            if not options:
                break
            dy, dx = self.choose(r, c, options, previous)
            r, c = r + dy, c + dx
            previous = (dy, dx)
            path.append((c, r))
            self.visit(r, c)
        return Stroke(tuple(path), StrokeKind.LINE)


def trace_strokes(skeleton: Skeleton, grad: GradientField,
                  min_magnitude: float = DEFAULT_MIN_MAGNITUDE) -> List[Stroke]:
    """把骨架拆成笔画，每个骨架点恰好出现一次

    从端点起步沿未访问的 8 邻居前进；分叉处优先与局部切线最共线的邻居，
    平局按北起顺时针次序决定。
    """
    check_thin(skeleton)
    if grad.shape != skeleton.shape:
        raise ShapeError(f"gradient field {grad.shape} does not match skeleton {skeleton.shape}")
    walker = _Walker(skeleton, grad, min_magnitude)
    strokes: List[Stroke] = []
    while walker.unvisited.any():
        strokes.append(walker.walk())
    logger.debug(f"Strokes traced - strokes: {len(strokes)} - pixels: {skeleton.count}")
    return strokes
