"""路径规划：骨架、梯度、追踪、填充与排序"""
from .skeleton import Skeleton, skeletonize, zhang_suen_thin, neighbor_count
from .gradient import GradientField, canny_gradient
from .tracer import trace_strokes, check_thin
from .fills import plan_fills, fill_pixels, fill_regions, peel_rings
from .ordering import order_strokes
from .trajectory import (
    Stroke,
    StrokeKind,
    Trajectory,
    pen_up_distance,
    dump_trajectory,
    load_trajectory,
)

__all__ = [
    'Skeleton',
    'skeletonize',
    'zhang_suen_thin',
    'neighbor_count',
    'GradientField',
    'canny_gradient',
    'trace_strokes',
    'check_thin',
    'plan_fills',
    'fill_pixels',
    'fill_regions',
    'peel_rings',
    'order_strokes',
    'Stroke',
    'StrokeKind',
    'Trajectory',
    'pen_up_distance',
    'dump_trajectory',
    'load_trajectory',
]
