"""Shared geometry and raster types.

Conventions used throughout the package:

* Images are float64 arrays of shape (height, width).  Binary ink images
  and label masks hold 1.0 for ink/membership and 0.0 otherwise; residual
  images live in [-1, 1].
* Canvas coordinates are (x, y) with x along columns and y along rows.
  The center of pixel ``img[r, c]`` is the point (c, r); a size-s canvas
  spans [0, s) on both axes.
* Rasterization is an analytic coverage test: a pixel is inked iff its
  center lies within half the stroke width of a polyline segment, which
  yields round caps and joins and makes a brute-force per-pixel oracle
  possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np
from PIL import Image

from . import kernels


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Stroke:
    """One pen-down polyline; consecutive duplicate points are not allowed."""

    points: np.ndarray  # (n, 2) float64, n >= 1

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 1:
            raise ValueError("stroke needs an (n, 2) array with n >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("stroke coordinates must be finite")
        if len(pts) > 1 and np.any(np.all(pts[1:] == pts[:-1], axis=1)):
            raise ValueError("consecutive duplicate points in stroke")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def segments(self) -> np.ndarray:
        """(m, 4) rows (x1, y1, x2, y2); a single point yields a dot row."""
        pts = self.points
        if len(pts) == 1:
            return np.hstack([pts, pts])
        return np.hstack([pts[:-1], pts[1:]])


def stroke_from_xy(xs: Iterable[float], ys: Iterable[float]) -> Stroke | None:
    """Build a stroke from parallel coordinate lists, dropping consecutive
    duplicates.  Returns None when nothing is left."""
    pts = np.column_stack([np.asarray(list(xs), dtype=np.float64),
                           np.asarray(list(ys), dtype=np.float64)])
    if len(pts) == 0:
        return None
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    return Stroke(pts[keep])


@dataclass(frozen=True)
class Sketch:
    """An ordered list of strokes on a square canvas."""

    strokes: tuple[Stroke, ...]
    canvas_size: int

    def __post_init__(self):
        if self.canvas_size < 1:
            raise ValueError("canvas_size must be positive")
        object.__setattr__(self, "strokes", tuple(self.strokes))

    def all_points(self) -> np.ndarray:
        if not self.strokes:
            return np.zeros((0, 2), dtype=np.float64)
        return np.vstack([s.points for s in self.strokes])


@dataclass
class SkeletonGraph:
    """Sub-pixel vertices plus undirected edges between vertex indices."""

    vertices: np.ndarray  # (n, 2) float64
    edges: set[tuple[int, int]] = field(default_factory=set)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        self.edges = {normalize_edge(u, v) for u, v in self.edges}
        n = len(self.vertices)
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loop edge")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references missing vertex")

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json_dict(self) -> dict:
        return {
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
            "edges": [[u, v] for u, v in self.sorted_edges()],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SkeletonGraph":
        verts = np.asarray(d["vertices"], dtype=np.float64).reshape(-1, 2)
        edges = {normalize_edge(int(u), int(v)) for u, v in d["edges"]}
        return cls(verts, edges)


def normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def strokes_to_segments(strokes: Iterable[Stroke]) -> np.ndarray:
    segs = [s.segments() for s in strokes]
    if not segs:
        return np.zeros((0, 4), dtype=np.float64)
    return np.vstack(segs)


def rasterize(strokes: Iterable[Stroke], size: int, width: float) -> np.ndarray:
    """Binary ink image of the polylines: 1.0 where the pixel center is
    within width/2 of any segment, else 0.0.

    All points must lie inside [0, size) on both axes; bit-identical output
    for identical input.
    """
    if size < 8:
        raise ValueError("size must be >= 8")
    if width < 1:
        raise ValueError("width must be >= 1")
    segments = strokes_to_segments(strokes)
    if len(segments):
        xs = segments[:, [0, 2]]
        ys = segments[:, [1, 3]]
        if xs.min() < 0 or ys.min() < 0 or xs.max() >= size or ys.max() >= size:
            raise ValueError("out of bounds: stroke points must lie in [0, size)")
    hit = kernels.rasterize_segments(np.ascontiguousarray(segments), size, width / 2.0)
    return hit.astype(np.float64)


def rasterize_disks(centers: np.ndarray, size: int, radius: float) -> np.ndarray:
    """Binary image of disks of the given radius at each center point."""
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    segments = np.hstack([centers, centers])
    hit = kernels.rasterize_segments(np.ascontiguousarray(segments), size, radius)
    return hit.astype(np.float64)


def rasterize_graph(graph: SkeletonGraph, size: int, width: float) -> np.ndarray:
    """Render a graph's edges as straight chords of the given stroke width."""
    edges = graph.sorted_edges()
    if not edges:
        return np.zeros((size, size), dtype=np.float64)
    idx = np.asarray(edges, dtype=np.int64)
    segments = np.hstack([graph.vertices[idx[:, 0]], graph.vertices[idx[:, 1]]])
    hit = kernels.rasterize_segments(np.ascontiguousarray(segments), size, width / 2.0)
    return hit.astype(np.float64)


def residual(input_image: np.ndarray, rendered: np.ndarray) -> np.ndarray:
    """Elementwise input - rendered.  Positive values mark missing ink
    (false negatives), negative values extra ink (false positives)."""
    a = np.asarray(input_image, dtype=np.float64)
    b = np.asarray(rendered, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a - b


def save_png(image: np.ndarray, path: str | Path) -> None:
    """Write a [0, 1] grayscale image as 8-bit PNG (value v maps to v*255)."""
    arr = np.asarray(image, dtype=np.float64)
    data = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path, format="PNG")


def load_png(path: str | Path) -> np.ndarray:
    """Read an 8-bit grayscale PNG into a [0, 1] float image (v / 255)."""
    with Image.open(path) as im:
        data = np.asarray(im.convert("L"), dtype=np.float64)
    return data / 255.0


def save_mask_png(channels: tuple[np.ndarray, np.ndarray, np.ndarray],
                  path: str | Path) -> None:
    """Write three [0, 1] mask planes as an RGB PNG (255 = membership)."""
    planes = [np.rint(np.clip(np.asarray(c, dtype=np.float64), 0, 1) * 255).astype(np.uint8)
              for c in channels]
    Image.fromarray(np.dstack(planes), mode="RGB").save(path, format="PNG")


def load_mask_png(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with Image.open(path) as im:
        data = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    return data[:, :, 0], data[:, :, 1], data[:, :, 2]


def point_segment_distance(px: float, py: float, x1: float, y1: float,
                           x2: float, y2: float) -> float:
    """Euclidean distance from a point to a closed segment."""
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
    return math.hypot(dx, dy)
