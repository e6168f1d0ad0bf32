"""笔画与轨迹模型"""
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..api.exceptions import DataError
from logger import setup_logger

logger = setup_logger(__name__)

# 像素坐标 (x = 列, y = 行)
Point = Tuple[int, int]


class StrokeKind(str, Enum):
    LINE = 'line'
    FILL_LOOP = 'fill-loop'


@dataclass(frozen=True)
class Stroke:
    """有序像素点列，相邻点互为 8 邻居"""
    points: Tuple[Point, ...]
    kind: StrokeKind = StrokeKind.LINE

    def __post_init__(self):
        points = tuple((int(x), int(y)) for x, y in self.points)
        if not points:
            raise DataError("stroke needs at least one point")
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'kind', StrokeKind(self.kind))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def start(self) -> Point:
        return self.points[0]

    @property
    def end(self) -> Point:
        return self.points[-1]

    def reversed(self) -> 'Stroke':
        return Stroke(self.points[::-1], self.kind)

    def is_connected(self) -> bool:
        """相邻点是否都是 8 邻居"""
        return all(max(abs(x1 - x0), abs(y1 - y0)) == 1
                   for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind.value, 'points': [list(p) for p in self.points]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Stroke':
        return cls(tuple(tuple(p) for p in data['points']), StrokeKind(data['kind']))


def distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def pen_up_distance(strokes: Sequence[Stroke], origin: Point = (0, 0)) -> float:
    """抬笔移动总长：原点到首笔起点，加上每笔终点到下一笔起点"""
    total = 0.0
    position = origin
    for stroke in strokes:
        total += distance(position, stroke.start)
        position = stroke.end
    return total


@dataclass
class Trajectory:
    """排序后的笔画序列

    order[i] 为第 i 笔在输入中的下标，flipped[i] 表示该笔是否被反向。
    """
    strokes: List[Stroke] = field(default_factory=list)
    order: Tuple[int, ...] = ()
    flipped: Tuple[bool, ...] = ()
    origin: Point = (0, 0)

    @property
    def travel(self) -> float:
        return pen_up_distance(self.strokes, self.origin)

    @property
    def point_count(self) -> int:
        return sum(len(s) for s in self.strokes)

    def counts_by_kind(self) -> Dict[str, int]:
        counts = {kind.value: 0 for kind in StrokeKind}
        for stroke in self.strokes:
            counts[stroke.kind.value] += 1
        return counts

    def rasterize(self, shape: Tuple[int, int]) -> np.ndarray:
        """把全部笔画点画到 (h, w) 布尔画布上"""
        canvas = np.zeros(shape, dtype=bool)
        for stroke in self.strokes:
            xs, ys = zip(*stroke.points)
            canvas[list(ys), list(xs)] = True
        return canvas


def dump_trajectory(traj: Trajectory) -> str:
    """调试输出：每行一个 JSON 笔画记录"""
    lines = [json.dumps(s.to_dict(), sort_keys=True, separators=(',', ':')) for s in traj.strokes]
    return ''.join(line + '\n' for line in lines)


def load_trajectory(text: str, origin: Optional[Point] = None) -> Trajectory:
    strokes = [Stroke.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
    n = len(strokes)
    return Trajectory(strokes, tuple(range(n)), (False,) * n, origin or (0, 0))
