"""Synthetic segmentation dataset: sketch ingestion, ground-truth graphs
and label masks, augmentation, and mask degradation.

Ground truth construction: every polyline breakpoint (stroke endpoints and
interior corners) is a graph vertex, crossings found by the sweep line are
appended, near-coincident candidates merge within 1 px, and stroke
segments are split at the crossings to become edges.  The vertex channel
rasterizes a disk per vertex; subtracting it from the ink image leaves the
edge channel; everything else is background, so the three channels
partition every pixel exactly.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    SkeletonGraph,
    Sketch,
    Stroke,
    normalize_edge,
    rasterize,
    rasterize_disks,
    stroke_from_xy,
)
from .intersect import DEFAULT_EPS, find_intersections

log = logging.getLogger(__name__)

AUGMENT_BOUND = 1.0 / 20.0
MERGE_TOLERANCE_PX = 1.0


class NdjsonError(ValueError):
    """Malformed sketch stream; carries the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class LabelMasks:
    """Per-pixel vertex / edge / background channels."""

    vertex: np.ndarray
    edge: np.ndarray
    background: np.ndarray
    size: int


@dataclass
class Sample:
    """One dataset record: input image, label masks, and the true graph."""

    sketch: Sketch
    image: np.ndarray
    masks: LabelMasks
    graph: SkeletonGraph
    seed: int


@dataclass(frozen=True)
class AugmentParams:
    """Geometric jitter, each bounded to one twentieth of the canvas/circle."""

    translate: tuple[float, float] = (0.0, 0.0)
    flip: bool = False
    rotate: float = 0.0
    scale: float = 0.0

    def __post_init__(self):
        for name, value in (("translate x", self.translate[0]),
                            ("translate y", self.translate[1]),
                            ("rotate", self.rotate),
                            ("scale", self.scale)):
            if not -AUGMENT_BOUND < value < AUGMENT_BOUND:
                raise ValueError(f"augment {name} out of (-1/20, 1/20): {value}")


class OffCanvasError(ValueError):
    """An augmentation pushed geometry outside the canvas."""


def parse_sketch_ndjson(data: bytes, canvas_size: int = 256) -> list[Sketch]:
    """Parse newline-delimited JSON sketches.

    Each line holds an object with a "drawing" field: a list of strokes,
    each stroke a pair of parallel coordinate arrays [[xs...], [ys...]].
    Malformed lines raise NdjsonError naming the line; empty strokes and
    empty drawings are skipped with a logged count.
    """
    sketches: list[Sketch] = []
    skipped = 0
    for lineno, raw_line in enumerate(data.splitlines(), start=1):
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NdjsonError(lineno, "invalid UTF-8") from exc
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise NdjsonError(lineno, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict) or "drawing" not in obj:
            raise NdjsonError(lineno, 'missing "drawing" field')
        strokes: list[Stroke] = []
        for raw in obj["drawing"]:
            if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
                raise NdjsonError(lineno, "stroke is not an [xs, ys] pair")
            xs, ys = raw
            if len(xs) != len(ys):
                raise NdjsonError(lineno, "stroke coordinate arrays differ in length")
            if len(xs) == 0:
                skipped += 1
                continue
            stroke = stroke_from_xy(xs, ys)
            if stroke is None:
                skipped += 1
                continue
            strokes.append(stroke)
        if not strokes:
            skipped += 1
            continue
        sketches.append(Sketch(tuple(strokes), canvas_size))
    if skipped:
        log.warning("parse_sketch_ndjson skipped %d empty strokes/drawings", skipped)
    return sketches


def normalize_sketch(sketch: Sketch, size: int, margin: float) -> Sketch:
    """Uniformly scale and center so the bounding box fits the canvas with
    the given margin; coincident-point sketches sit at the center unscaled."""
    if not sketch.strokes:
        raise ValueError("cannot normalize an empty sketch")
    if 2 * margin >= size:
        raise ValueError("margin too large for canvas")
    pts = sketch.all_points()
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    scale = 1.0 if extent == 0.0 else (size - 2.0 * margin) / extent
    center = (lo + hi) / 2.0
    target = np.array([size / 2.0, size / 2.0])
    strokes = tuple(Stroke((s.points - center) * scale + target)
                    for s in sketch.strokes)
    return Sketch(strokes, size)


def _segment_param(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    ee = float(d @ d)
    if ee == 0.0:
        return 0.0
    t = float((point - a) @ d) / ee
    return min(1.0, max(0.0, t))


class _VertexRegistry:
    """Registers candidate vertices, merging any within the tolerance onto
    the first-seen representative."""

    def __init__(self, tol: float):
        self.tol = tol
        self.points: list[np.ndarray] = []

    def add(self, p) -> int:
        p = np.asarray(p, dtype=np.float64)
        for idx, q in enumerate(self.points):
            if math.hypot(p[0] - q[0], p[1] - q[1]) <= self.tol:
                return idx
        self.points.append(p)
        return len(self.points) - 1

    def as_array(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 2), dtype=np.float64)
        return np.vstack(self.points)


def build_graph(sketch: Sketch, eps: float = DEFAULT_EPS,
                merge_tol: float = MERGE_TOLERANCE_PX) -> SkeletonGraph:
    """Skeleton graph of a sketch: breakpoints plus crossings as vertices,
    stroke segments split at crossings as edges."""
    registry = _VertexRegistry(merge_tol)
    stroke_pt_ids: list[list[int]] = []
    seg_rows: list[tuple[float, float, float, float]] = []
    seg_ends: list[tuple[int, int]] = []  # (vertex id of a, of b)
    seg_ab: list[tuple[np.ndarray, np.ndarray]] = []

    for stroke in sketch.strokes:
        ids = [registry.add(p) for p in stroke.points]
        stroke_pt_ids.append(ids)
        pts = stroke.points
        for k in range(len(pts) - 1):
            seg_rows.append((pts[k, 0], pts[k, 1], pts[k + 1, 0], pts[k + 1, 1]))
            seg_ends.append((ids[k], ids[k + 1]))
            seg_ab.append((pts[k], pts[k + 1]))

    splits: dict[int, list[tuple[float, int]]] = {}
    if len(seg_rows) >= 2:
        for point, (i, j) in find_intersections(seg_rows, eps):
            vid = registry.add(point)
            p = np.array([point.x, point.y])
            for s in (i, j):
                t = _segment_param(p, seg_ab[s][0], seg_ab[s][1])
                splits.setdefault(s, []).append((t, vid))

    edges: set[tuple[int, int]] = set()
    for s, (ida, idb) in enumerate(seg_ends):
        chain = [(0.0, ida)] + sorted(splits.get(s, [])) + [(1.0, idb)]
        for (_, u), (_, v) in zip(chain[:-1], chain[1:]):
            if u != v:
                edges.add(normalize_edge(u, v))

    return SkeletonGraph(registry.as_array(), edges)


def make_masks(image: np.ndarray, graph: SkeletonGraph, size: int,
               vertex_radius: float) -> LabelMasks:
    vertex = rasterize_disks(graph.vertices, size, vertex_radius)
    edge = np.clip(image - vertex, 0.0, 1.0)
    background = 1.0 - (edge + vertex)
    return LabelMasks(vertex, edge, background, size)


def build_ground_truth(sketch: Sketch, size: int | None = None,
                       stroke_width: float = 2.0, vertex_radius: float = 3.0,
                       seed: int = 0) -> Sample:
    """Full dataset record for a normalized (canvas-fitting) sketch."""
    size = sketch.canvas_size if size is None else size
    graph = build_graph(sketch)
    image = rasterize(sketch.strokes, size, stroke_width)
    masks = make_masks(image, graph, size, vertex_radius)
    return Sample(sketch, image, masks, graph, seed)


def vertex_spacing(graph: SkeletonGraph) -> float:
    """Smallest pairwise vertex distance; inf for graphs below two vertices."""
    v = graph.vertices
    if len(v) < 2:
        return math.inf
    d = v[:, None, :] - v[None, :, :]
    dist = np.sqrt((d ** 2).sum(axis=2))
    dist[np.diag_indices(len(v))] = np.inf
    return float(dist.min())


def augment_transform(params: AugmentParams, size: int) -> tuple[np.ndarray, np.ndarray]:
    """2x2 matrix A and offset b with p' = A p + b: scale then rotate about
    the canvas center, then horizontal flip, then translate."""
    s = 1.0 + params.scale
    theta = params.rotate * 2.0 * math.pi
    c, sn = math.cos(theta), math.sin(theta)
    a = np.array([[c * s, -sn * s], [sn * s, c * s]])
    if params.flip:
        a = np.array([[-1.0, 0.0], [0.0, 1.0]]) @ a
    center = np.array([size / 2.0, size / 2.0])
    t = np.array([params.translate[0] * size, params.translate[1] * size])
    offset = center + t - a @ center
    return a, offset


def augment(sample: Sample, params: AugmentParams, stroke_width: float = 2.0,
            vertex_radius: float = 3.0) -> Sample:
    """Apply the jitter in the vector domain and re-rasterize image and
    masks; the graph gets the identical transform.  Raises OffCanvasError
    when any point leaves the canvas."""
    size = sample.sketch.canvas_size
    a, offset = augment_transform(params, size)

    def apply(pts: np.ndarray) -> np.ndarray:
        return pts @ a.T + offset

    new_strokes = tuple(Stroke(apply(s.points)) for s in sample.sketch.strokes)
    all_pts = np.vstack([s.points for s in new_strokes]) if new_strokes else np.zeros((0, 2))
    if len(all_pts) and (all_pts.min() < 0 or all_pts.max() >= size):
        raise OffCanvasError("augmentation pushed points off-canvas")
    new_vertices = apply(sample.graph.vertices) if len(sample.graph.vertices) else sample.graph.vertices
    if len(new_vertices) and (new_vertices.min() < 0 or new_vertices.max() >= size):
        raise OffCanvasError("augmentation pushed vertices off-canvas")

    sketch = Sketch(new_strokes, size)
    graph = SkeletonGraph(new_vertices, set(sample.graph.edges))
    image = rasterize(sketch.strokes, size, stroke_width)
    masks = make_masks(image, graph, size, vertex_radius)
    return Sample(sketch, image, masks, graph, sample.seed)


def sample_augment_params(rng: np.random.Generator) -> AugmentParams:
    b = AUGMENT_BOUND
    return AugmentParams(
        translate=(float(rng.uniform(-b, b)), float(rng.uniform(-b, b))),
        flip=bool(rng.integers(0, 2)),
        rotate=float(rng.uniform(-b, b)),
        scale=float(rng.uniform(-b, b)),
    )


def _dilate8(mask: np.ndarray, iterations: int) -> np.ndarray:
    m = mask > 0.5
    for _ in range(iterations):
        p = np.pad(m, 1)
        m = (p[:-2, :-2] | p[:-2, 1:-1] | p[:-2, 2:]
             | p[1:-1, :-2] | p[1:-1, 1:-1] | p[1:-1, 2:]
             | p[2:, :-2] | p[2:, 1:-1] | p[2:, 2:])
    return m.astype(np.float64)


def degrade_masks(masks: LabelMasks, drop_rate: float = 0.0,
                  dilate_vertices_px: int = 0, salt_rate: float = 0.0,
                  seed: int = 0) -> LabelMasks:
    """Stress fixture standing in for imperfect segmentation output: drop
    edge pixels independently, dilate vertex islands, sprinkle salt onto
    the edge channel, then recompute the background."""
    if not 0.0 <= drop_rate <= 1.0 or not 0.0 <= salt_rate <= 1.0:
        raise ValueError("rates must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edge = masks.edge.copy()
    if drop_rate > 0.0:
        drop = rng.random(edge.shape) < drop_rate
        edge[drop & (edge > 0.5)] = 0.0
    vertex = masks.vertex.copy()
    if dilate_vertices_px > 0:
        vertex = _dilate8(vertex, dilate_vertices_px)
    if salt_rate > 0.0:
        salt = rng.random(edge.shape) < salt_rate
        edge = np.maximum(edge, salt.astype(np.float64))
    background = np.clip(1.0 - (edge + vertex), 0.0, 1.0)
    return LabelMasks(vertex, edge, background, masks.size)


# ---------------------------------------------------------------------------
# Seeded sketch sampler.  Stands in for hand-drawn stroke data when none is
# supplied: wandering polylines with pronounced corners, kept inside the
# margin box.  Segment lengths and turn angles are chosen so that chords
# between non-adjacent vertices leave the inked path, which keeps the graph
# round-trippable from its own masks.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SketchGenParams:
    size: int = 256
    margin: float = 8.0
    strokes_min: int = 4
    strokes_max: int = 10
    segments_min: int = 3
    segments_max: int = 8
    seg_len_min: float = 9.0
    seg_len_max: float = 16.0
    turn_min_deg: float = 40.0
    turn_max_deg: float = 80.0
    min_spacing: float = 8.0  # > 2 * vertex_radius keeps vertex islands disjoint
    stroke_attempts: int = 12


def _random_stroke(rng: np.random.Generator, gp: SketchGenParams) -> Stroke | None:
    lo = gp.margin
    hi = gp.size - gp.margin
    x = float(rng.uniform(lo, hi))
    y = float(rng.uniform(lo, hi))
    heading = float(rng.uniform(0.0, 2.0 * math.pi))
    pts = [(x, y)]
    n_seg = int(rng.integers(gp.segments_min, gp.segments_max + 1))
    for _ in range(n_seg):
        step = float(rng.uniform(gp.seg_len_min, gp.seg_len_max))
        nx = x + step * math.cos(heading)
        ny = y + step * math.sin(heading)
        # bounce off the margin box instead of clipping the step short
        if nx < lo or nx > hi:
            heading = math.pi - heading
            nx = x + step * math.cos(heading)
        if ny < lo or ny > hi:
            heading = -heading
            ny = y + step * math.sin(heading)
        nx = min(hi, max(lo, nx))
        ny = min(hi, max(lo, ny))
        if (nx, ny) != (x, y):
            pts.append((nx, ny))
            x, y = nx, ny
        turn = math.radians(float(rng.uniform(gp.turn_min_deg, gp.turn_max_deg)))
        heading += turn if rng.random() < 0.5 else -turn
    if len(pts) < 2:
        return None
    return Stroke(np.asarray(pts, dtype=np.float64))


def random_sketch(rng: np.random.Generator, gp: SketchGenParams = SketchGenParams()) -> Sketch:
    """Grow a sketch stroke by stroke, keeping every graph vertex (corners
    and crossings included) farther apart than the spacing guard; a stroke
    that cannot be placed after a few tries is dropped."""
    n_strokes = int(rng.integers(gp.strokes_min, gp.strokes_max + 1))
    strokes: list[Stroke] = []
    for _ in range(n_strokes):
        for _ in range(gp.stroke_attempts):
            stroke = _random_stroke(rng, gp)
            if stroke is None:
                continue
            trial = Sketch(tuple(strokes) + (stroke,), gp.size)
            if vertex_spacing(build_graph(trial)) > gp.min_spacing:
                strokes.append(stroke)
                break
    if not strokes:
        lo = gp.margin
        strokes.append(Stroke(np.array([[lo, lo], [lo + 12.0, lo + 9.0]])))
    return Sketch(tuple(strokes), gp.size)


def sample_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-sample stream; safe for parallel generation."""
    return np.random.default_rng([master_seed, index])


def generate_sample(master_seed: int, index: int,
                    gp: SketchGenParams = SketchGenParams(),
                    stroke_width: float = 2.0, vertex_radius: float = 3.0,
                    max_attempts: int = 16) -> Sample:
    """One reproducible dataset sample.  The sketch sampler enforces the
    vertex spacing guard per stroke; the outer rejection loop is a final
    safety net keeping the vertex islands disjoint in the masks."""
    rng = sample_rng(master_seed, index)
    for _ in range(max_attempts):
        sketch = random_sketch(rng, gp)
        sample = build_ground_truth(sketch, gp.size, stroke_width, vertex_radius,
                                    seed=master_seed)
        if vertex_spacing(sample.graph) > gp.min_spacing:
            return sample
    raise RuntimeError(f"no valid sketch after {max_attempts} attempts "
                       f"(seed={master_seed}, index={index})")
