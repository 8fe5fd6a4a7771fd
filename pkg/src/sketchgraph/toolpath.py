"""Pen strokes from a skeleton graph, and machine-file emission.

Stroke extraction walks the graph greedily: start at the smallest vertex
id that still has edges, repeatedly pop the smallest-id neighbor of the
current endpoint, and extend until the endpoint runs dry.  Every edge is
traversed exactly once; vertices may repeat.  Sorted adjacency makes the
output reproducible.

Plate mapping fits the drawing into a 64 mm box whose lower corner sits at
(25 mm, 25 mm).  GCODE uses G00 Z-5 to lift the pen and G01 Z0 to drop it;
coordinates are millimetres with two decimals.  SVG paths stay in canvas
pixels; scaling is left to the consuming machine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SkeletonGraph

PLATE_SIZE_MM = 64.0
PLATE_ORIGIN_MM = (25.0, 25.0)


@dataclass
class StrokeSequence:
    """Ordered vertex-id paths covering each graph edge exactly once."""

    paths: list[list[int]]
    graph: SkeletonGraph

    def __len__(self) -> int:
        return len(self.paths)

    def edge_multiset(self) -> list[tuple[int, int]]:
        out = []
        for path in self.paths:
            for u, v in zip(path[:-1], path[1:]):
                out.append((u, v) if u < v else (v, u))
        return sorted(out)


def strokes_from_graph(graph: SkeletonGraph) -> StrokeSequence:
    adj: dict[int, list[int]] = {v: [] for v in range(graph.num_vertices)}
    for u, v in graph.edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()

    def pop_edge(a: int, b: int) -> None:
        adj[a].remove(b)
        adj[b].remove(a)

    paths: list[list[int]] = []
    for start in range(graph.num_vertices):
        while adj[start]:
            u = start
            w = adj[u][0]
            pop_edge(u, w)
            path = [u, w]
            u = w
            while adj[u]:
                w = adj[u][0]
                pop_edge(u, w)
                path.append(w)
                u = w
            paths.append(path)
    return StrokeSequence(paths, graph)


@dataclass(frozen=True)
class PlateTransform:
    """Canvas px -> plate mm: p_mm = p_px * scale + offset."""

    scale: float
    offset: tuple[float, float]

    def apply(self, point) -> tuple[float, float]:
        return (float(point[0]) * self.scale + self.offset[0],
                float(point[1]) * self.scale + self.offset[1])


def fit_to_plate(bbox: tuple[float, float, float, float]) -> PlateTransform:
    """Uniformly scale the bbox (min_x, min_y, max_x, max_y) into the plate
    box, centering the smaller axis; a degenerate bbox lands mid-plate."""
    min_x, min_y, max_x, max_y = bbox
    w = max_x - min_x
    h = max_y - min_y
    if w < 0 or h < 0:
        raise ValueError("invalid bbox")
    extent = max(w, h)
    if extent == 0.0:
        center = PLATE_ORIGIN_MM[0] + PLATE_SIZE_MM / 2.0
        return PlateTransform(1.0, (center - min_x, center - min_y))
    scale = PLATE_SIZE_MM / extent
    pad_x = (PLATE_SIZE_MM - w * scale) / 2.0
    pad_y = (PLATE_SIZE_MM - h * scale) / 2.0
    return PlateTransform(scale, (PLATE_ORIGIN_MM[0] + pad_x - min_x * scale,
                                  PLATE_ORIGIN_MM[1] + pad_y - min_y * scale))


def graph_bbox(graph: SkeletonGraph) -> tuple[float, float, float, float]:
    if graph.num_vertices == 0:
        raise ValueError("empty graph has no bbox")
    v = graph.vertices
    return (float(v[:, 0].min()), float(v[:, 1].min()),
            float(v[:, 0].max()), float(v[:, 1].max()))


def _check_ids(seq: StrokeSequence, vertices: np.ndarray) -> None:
    n = len(vertices)
    for path in seq.paths:
        for vid in path:
            if not 0 <= vid < n:
                raise ValueError(f"stroke references invalid vertex id {vid}")


def emit_gcode(seq: StrokeSequence, vertices: np.ndarray,
               transform: PlateTransform) -> str:
    """Plotter program: lift, and per stroke move / drop / draw / lift."""
    _check_ids(seq, vertices)
    lines = ["G00 Z-5"]
    for path in seq.paths:
        pts = [transform.apply(vertices[vid]) for vid in path]
        lines.append(f"X{pts[0][0]:.2f} Y{pts[0][1]:.2f}")
        lines.append("G01 Z0")
        for x, y in pts[1:]:
            lines.append(f"X{x:.2f} Y{y:.2f}")
        lines.append("G00 Z-5")
    return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return format(float(v), "g")


def emit_svg(seq: StrokeSequence, vertices: np.ndarray, canvas_size: int) -> str:
    """Minimal SVG document with one path element per stroke."""
    _check_ids(seq, vertices)
    s = canvas_size
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" '
        f'viewBox="0 0 {s} {s}">',
        '<g fill="none" stroke="black" stroke-width="1">',
    ]
    for path in seq.paths:
        pts = [vertices[vid] for vid in path]
        d = f"M {_fmt(pts[0][0])} {_fmt(pts[0][1])}"
        for p in pts[1:]:
            d += f" L {_fmt(p[0])} {_fmt(p[1])}"
        lines.append(f'<path d="{d}" />')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
