import itertools
import math

import numpy as np
import pytest

from penportrait.api.exceptions import DataError
from penportrait.plan.ordering import order_strokes
from penportrait.plan.trajectory import (
    Stroke,
    StrokeKind,
    Trajectory,
    distance,
    dump_trajectory,
    load_trajectory,
    pen_up_distance,
)


def optimal_travel(strokes, origin=(0, 0)):
    """Held-Karp：状态为 (已画集合, 最后一笔, 是否反向)"""
    n = len(strokes)
    ends = [((s.start, s.end), (s.end, s.start)) for s in strokes]
    best = {}
    for i in range(n):
        for f in (0, 1):
            best[(1 << i, i, f)] = distance(origin, ends[i][f][0])
    for mask in range(1, 1 << n):
        for last, f in itertools.product(range(n), (0, 1)):
            cost = best.get((mask, last, f))
            if cost is None:
                continue
            exit_point = ends[last][f][1]
            for nxt in range(n):
                if mask & (1 << nxt):
                    continue
                for g in (0, 1):
                    key = (mask | (1 << nxt), nxt, g)
                    value = cost + distance(exit_point, ends[nxt][g][0])
                    if value < best.get(key, math.inf):
                        best[key] = value
    full = (1 << n) - 1
    return min(best[(full, i, f)] for i in range(n) for f in (0, 1))


def _random_strokes(rng, n):
    strokes = []
    for _ in range(n):
        length = int(rng.integers(1, 4))
        points = [tuple(int(v) for v in rng.integers(0, 50, size=2)) for _ in range(length)]
        strokes.append(Stroke(tuple(points)))
    return strokes


def _column(x, rows=2):
    return Stroke(tuple((x, y) for y in range(rows)))


class TestOrderStrokes:
    def test_empty(self):
        traj = order_strokes([])
        assert traj.strokes == [] and traj.travel == 0

    def test_single_stroke_is_identity(self):
        stroke = _column(5)
        traj = order_strokes([stroke])
        assert traj.order == (0,) and traj.flipped == (False,)
        assert traj.strokes == [stroke]

    def test_single_stroke_starts_at_nearer_end(self):
        stroke = Stroke(((36, 6), (7, 3)))
        traj = order_strokes([stroke])
        assert traj.flipped == (True,)
        assert traj.strokes[0].start == (7, 3)
        assert traj.travel == pytest.approx(math.hypot(7, 3))

    def test_nearest_first(self):
        traj = order_strokes([_column(20), _column(0), _column(10)])
        assert traj.order == (1, 2, 0)
        assert traj.travel == pytest.approx(20.0)

    def test_flipped_strokes_are_reversed(self):
        strokes = [_column(20), _column(0), _column(10)]
        traj = order_strokes(strokes)
        for stroke, index, flipped in zip(traj.strokes, traj.order, traj.flipped):
            expected = strokes[index].reversed() if flipped else strokes[index]
            assert stroke == expected

    def test_origin_changes_start(self):
        traj = order_strokes([_column(0), _column(30)], origin=(30, 0))
        assert traj.order[0] == 1

    def test_against_exact_optimum(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            strokes = _random_strokes(rng, n)
            traj = order_strokes(strokes)
            assert sorted(traj.order) == list(range(n))
            assert traj.travel <= pen_up_distance(strokes) + 1e-9
            assert traj.travel <= 1.6 * optimal_travel(strokes) + 1e-9
            assert traj.point_count == sum(len(s) for s in strokes)

    def test_deterministic(self):
        strokes = _random_strokes(np.random.default_rng(3), 12)
        assert order_strokes(strokes).order == order_strokes(strokes).order


class TestTrajectory:
    def test_pen_up_distance(self):
        strokes = [Stroke(((3, 4), (3, 5))), Stroke(((3, 8),))]
        assert pen_up_distance(strokes) == pytest.approx(5.0 + 3.0)

    def test_counts_by_kind(self):
        traj = Trajectory([Stroke(((0, 0),)), Stroke(((1, 1),), StrokeKind.FILL_LOOP)])
        assert traj.counts_by_kind() == {'line': 1, 'fill-loop': 1}

    def test_rasterize(self):
        traj = Trajectory([Stroke(((0, 0), (1, 0))), Stroke(((2, 1),))])
        canvas = traj.rasterize((2, 3))
        np.testing.assert_array_equal(canvas, [[True, True, False], [False, False, True]])

    def test_dump_and_load_lines(self):
        traj = Trajectory([Stroke(((0, 0), (1, 1))), Stroke(((4, 2),), StrokeKind.FILL_LOOP)])
        text = dump_trajectory(traj)
        assert text.count('\n') == 2
        assert load_trajectory(text).strokes == traj.strokes

    def test_stroke_needs_points(self):
        with pytest.raises(DataError):
            Stroke(())
