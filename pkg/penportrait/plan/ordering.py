"""笔画排序：贪心最近邻 + 2-opt，减少抬笔移动"""
from typing import List, Sequence, Tuple

from .trajectory import Point, Stroke, Trajectory, distance, pen_up_distance
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_MAX_PASSES = 20
_IMPROVE_EPS = 1e-9

# (输入下标, 是否反向)
Oriented = Tuple[int, bool]


def _ends(strokes: Sequence[Stroke], item: Oriented) -> Tuple[Point, Point]:
    stroke = strokes[item[0]]
    return (stroke.end, stroke.start) if item[1] else (stroke.start, stroke.end)


def _greedy(strokes: Sequence[Stroke], origin: Point) -> List[Oriented]:
    remaining = set(range(len(strokes)))
    position = origin
    tour: List[Oriented] = []
    while remaining:
        best = None
        for index in sorted(remaining):
            stroke = strokes[index]
            for flipped, entry in ((False, stroke.start), (True, stroke.end)):
                d = distance(position, entry)
                if best is None or d < best[0] - _IMPROVE_EPS:
                    best = (d, index, flipped)
        _, index, flipped = best
        tour.append((index, flipped))
        remaining.remove(index)
        position = _ends(strokes, (index, flipped))[1]
    return tour


def _two_opt(strokes: Sequence[Stroke], tour: List[Oriented], origin: Point, max_passes: int) -> List[Oriented]:
    """反转区间 [i, j]（区间内每笔同时反向），只有两条边界边的长度改变"""
    n = len(tour)
    for _ in range(max_passes):
        improved = False
        for i in range(n):
            prev_end = origin if i == 0 else _ends(strokes, tour[i - 1])[1]
            start_i = _ends(strokes, tour[i])[0]
            for j in range(i + 1, n):
                end_j = _ends(strokes, tour[j])[1]
                before = distance(prev_end, start_i)
                after = distance(prev_end, end_j)
                if j + 1 < n:
                    next_start = _ends(strokes, tour[j + 1])[0]
                    before += distance(end_j, next_start)
                    after += distance(start_i, next_start)
                if after < before - _IMPROVE_EPS:
                    tour[i:j + 1] = [(index, not flipped) for index, flipped in reversed(tour[i:j + 1])]
                    start_i = _ends(strokes, tour[i])[0]
                    improved = True
        if not improved:
            break
    return tour


def _flip_pass(strokes: Sequence[Stroke], tour: List[Oriented], origin: Point) -> List[Oriented]:
    """单笔反向能缩短时就反向"""
    for k in range(len(tour)):
        prev_end = origin if k == 0 else _ends(strokes, tour[k - 1])[1]
        start, end = _ends(strokes, tour[k])
        before = distance(prev_end, start)
        after = distance(prev_end, end)
        if k + 1 < len(tour):
            next_start = _ends(strokes, tour[k + 1])[0]
            before += distance(end, next_start)
            after += distance(start, next_start)
        if after < before - _IMPROVE_EPS:
            tour[k] = (tour[k][0], not tour[k][1])
    return tour


def _build(strokes: Sequence[Stroke], tour: Sequence[Oriented], origin: Point) -> Trajectory:
    oriented = [strokes[i].reversed() if flipped else strokes[i] for i, flipped in tour]
    return Trajectory(
        oriented,
        tuple(i for i, _ in tour),
        tuple(flipped for _, flipped in tour),
        origin,
    )


def order_strokes(strokes: Sequence[Stroke], origin: Point = (0, 0),
                  max_passes: int = DEFAULT_MAX_PASSES) -> Trajectory:
    """从离原点最近的笔画出发贪心排序，再做 2-opt 与单笔反向改进

    结果不会比输入顺序更差：若输入顺序的抬笔距离更短则原样返回。
    """
    strokes = list(strokes)
    identity = [(i, False) for i in range(len(strokes))]
    if not strokes:
        return _build(strokes, identity, origin)
    tour = _greedy(strokes, origin)
    greedy_travel = _build(strokes, tour, origin).travel
    tour = _flip_pass(strokes, _two_opt(strokes, tour, origin, max_passes), origin)
    result = _build(strokes, tour, origin)
    baseline = pen_up_distance(strokes, origin)
    if baseline < result.travel:
        result = _build(strokes, identity, origin)
    logger.debug(
        f"Strokes ordered - strokes: {len(strokes)} - input_travel: {baseline:.2f} - "
        f"greedy_travel: {greedy_travel:.2f} - final_travel: {result.travel:.2f}"
    )
    return result
