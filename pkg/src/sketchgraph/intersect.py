"""Segment intersection by plane sweep.

Events are segment endpoints ordered by x; an active list keeps every
segment whose eps-expanded x-interval still overlaps the sweep front, and
each incoming segment is tested against all active ones.  Pruning by
x-interval is conservative under the snap tolerance, so the reported set
matches an all-pairs test exactly while skipping the vast majority of
pairs on real sketches.

Pair semantics: an endpoint of one segment within ``eps`` of the other
segment is a touch and is reported at that endpoint (this covers
T-junctions, shared endpoints, and the boundary points of collinear
overlaps); otherwise a strict transversal crossing is reported at the
line-line solution.  Each reported point carries the id pair, deduplicated
within eps per pair.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Point

DEFAULT_EPS = 1e-6


def _dist_point_segment(px, py, x1, y1, x2, y2):
    ex = x2 - x1
    ey = y2 - y1
    ee = ex * ex + ey * ey
    if ee > 0.0:
        t = ((px - x1) * ex + (py - y1) * ey) / ee
        t = min(1.0, max(0.0, t))
    else:
        t = 0.0
    dx = px - (x1 + t * ex)
    dy = py - (y1 + t * ey)
    return math.sqrt(dx * dx + dy * dy)


def _cross_point(x1, y1, x2, y2, x3, y3, x4, y4):
    denom = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    a = x1 * y2 - y1 * x2
    b = x3 * y4 - y3 * x4
    px = (a * (x3 - x4) - (x1 - x2) * b) / denom
    py = (a * (y3 - y4) - (y1 - y2) * b) / denom
    return px, py


def segment_pair_hits(seg_a, seg_b, eps: float = DEFAULT_EPS) -> list[tuple[float, float]]:
    """Intersection points of two segments under the snap tolerance.

    Endpoint touches pre-empt the transversal test: for straight segments a
    crossing with an endpoint on the other segment is the same point.
    """
    x1, y1, x2, y2 = seg_a
    x3, y3, x4, y4 = seg_b

    touches = []
    if _dist_point_segment(x1, y1, x3, y3, x4, y4) <= eps:
        touches.append((x1, y1))
    if _dist_point_segment(x2, y2, x3, y3, x4, y4) <= eps:
        touches.append((x2, y2))
    if _dist_point_segment(x3, y3, x1, y1, x2, y2) <= eps:
        touches.append((x3, y3))
    if _dist_point_segment(x4, y4, x1, y1, x2, y2) <= eps:
        touches.append((x4, y4))
    if touches:
        out: list[tuple[float, float]] = []
        for p in touches:
            if all(math.hypot(p[0] - q[0], p[1] - q[1]) > eps for q in out):
                out.append(p)
        return out

    # Strict straddle test; degenerate orientations are all endpoint-touch
    # configurations and were settled above.
    o1 = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
    o2 = (x2 - x1) * (y4 - y1) - (y2 - y1) * (x4 - x1)
    o3 = (x4 - x3) * (y1 - y3) - (y4 - y3) * (x1 - x3)
    o4 = (x4 - x3) * (y2 - y3) - (y4 - y3) * (x2 - x3)
    if ((o1 > 0 and o2 < 0) or (o1 < 0 and o2 > 0)) and \
       ((o3 > 0 and o4 < 0) or (o3 < 0 and o4 > 0)):
        return [_cross_point(x1, y1, x2, y2, x3, y3, x4, y4)]
    return []


def _as_segment_array(segments) -> np.ndarray:
    arr = np.asarray(segments, dtype=np.float64)
    if arr.size == 0:
        return np.zeros((0, 4), dtype=np.float64)
    if arr.ndim == 3:  # list of ((x1,y1),(x2,y2))
        arr = arr.reshape(len(arr), 4)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError("segments must be (n, 4) or (n, 2, 2)")
    return arr


def find_intersections(segments, eps: float = DEFAULT_EPS) -> list[tuple[Point, tuple[int, int]]]:
    """All pairwise intersections among the segments, each reported once
    per (point, id pair), ids ordered ascending, output sorted by ids."""
    arr = _as_segment_array(segments)
    n = len(arr)
    if n < 2:
        return []
    for k in range(n):
        if arr[k, 0] == arr[k, 2] and arr[k, 1] == arr[k, 3]:
            raise ValueError(f"segment {k} has identical endpoints")

    min_x = np.minimum(arr[:, 0], arr[:, 2]) - eps
    max_x = np.maximum(arr[:, 0], arr[:, 2]) + eps
    min_y = np.minimum(arr[:, 1], arr[:, 3]) - eps
    max_y = np.maximum(arr[:, 1], arr[:, 3]) + eps

    order = np.argsort(min_x, kind="stable")
    active: list[int] = []
    found: list[tuple[Point, tuple[int, int]]] = []

    for j in map(int, order):
        start = min_x[j]
        active = [i for i in active if max_x[i] >= start]
        for i in active:
            if min_y[j] > max_y[i] or min_y[i] > max_y[j]:
                continue
            lo, hi = (i, j) if i < j else (j, i)
            for px, py in segment_pair_hits(arr[lo], arr[hi], eps):
                found.append((Point(px, py), (lo, hi)))
        active.append(j)

    found.sort(key=lambda hit: (hit[1][0], hit[1][1], hit[0].x, hit[0].y))
    return found
