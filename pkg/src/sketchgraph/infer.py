"""Graph inference from segmentation masks.

Vertices are sub-pixel centroids of 8-connected components of the vertex
channel.  Edge candidates are all vertex pairs; a pair's plausibility is
the mean edge-mask value inside a thin rectangle spanning it, accepted
when it exceeds a threshold.  The feedback loop renders the current graph,
compares against the input image, and nudges each pair's threshold: extra
ink along a pair raises it, missing ink lowers it.

Residual readout: a pointwise residual at a vertex is uninformative (the
vertex is always inked), so each endpoint reads the mean residual over its
half of the pair rectangle with the endpoint disks excluded, and a small
dead zone keeps rendering noise from flipping the update sign.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .core import SkeletonGraph, rasterize_graph, residual
from .synth import LabelMasks, Sample

BINARIZE_THRESHOLD = 0.5
DEAD_ZONE = 0.05


@dataclass(frozen=True)
class InferParams:
    """Feedback-loop parameters.

    beta: ROI rectangle width in px.
    tau0: initial plausibility threshold for every pair.
    rate: per-iteration threshold step (the update rate).
    i_max: number of update iterations.
    render_width: stroke width used to render the graph estimate; match
        the synthesis stroke width so residuals cancel on true strokes.
    vertex_radius: endpoint disk excluded from the residual readout.
    """

    beta: float = 1.8
    tau0: float = 0.35
    rate: float = 0.05
    i_max: int = 10
    render_width: float = 2.0
    vertex_radius: float = 3.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not 0.0 <= self.tau0 <= 1.0:
            raise ValueError("tau0 must lie in [0, 1]")
        if self.rate < 0:
            raise ValueError("rate must be >= 0")
        if self.i_max < 0:
            raise ValueError("i_max must be >= 0")


@dataclass
class FeedbackTrace:
    """Per-iteration edge sets plus the final per-pair state."""

    edge_sets: list[set[tuple[int, int]]] = field(default_factory=list)
    thresholds: dict[tuple[int, int], float] = field(default_factory=dict)
    responses: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def edge_counts(self) -> list[int]:
        return [len(s) for s in self.edge_sets]


def extract_vertices(vertex_mask: np.ndarray,
                     activation_threshold: float = BINARIZE_THRESHOLD) -> np.ndarray:
    """Sub-pixel vertices: unweighted centroids of the 8-connected
    components of the binarized mask, ordered by first pixel in scan order.
    Returns an (n, 2) array of (x, y)."""
    mask = np.asarray(vertex_mask, dtype=np.float64)
    on = mask > activation_threshold
    h, w = on.shape
    visited = np.zeros_like(on, dtype=bool)
    centroids: list[tuple[float, float]] = []
    for r0, c0 in np.argwhere(on):
        if visited[r0, c0]:
            continue
        queue = deque([(int(r0), int(c0))])
        visited[r0, c0] = True
        sum_x = 0.0
        sum_y = 0.0
        count = 0
        while queue:
            r, c = queue.popleft()
            sum_x += c
            sum_y += r
            count += 1
            for rr in range(max(0, r - 1), min(h, r + 2)):
                for cc in range(max(0, c - 1), min(w, c + 2)):
                    if on[rr, cc] and not visited[rr, cc]:
                        visited[rr, cc] = True
                        queue.append((rr, cc))
        centroids.append((sum_x / count, sum_y / count))
    if not centroids:
        return np.zeros((0, 2), dtype=np.float64)
    return np.asarray(centroids, dtype=np.float64)


def all_pairs(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    return np.asarray(list(combinations(range(n), 2)), dtype=np.int64)


def roi_response(edge_mask: np.ndarray, u, v, beta: float) -> float:
    """Mean edge-mask value over the rectangle of width beta spanning u-v."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if np.array_equal(u, v):
        raise ValueError("roi_response needs two distinct points")
    verts = np.ascontiguousarray(np.vstack([u, v]))
    pairs = np.array([[0, 1]], dtype=np.int64)
    return float(kernels.roi_means(np.ascontiguousarray(edge_mask, dtype=np.float64),
                                   verts, pairs, beta)[0])


def pair_responses(edge_mask: np.ndarray, vertices: np.ndarray,
                   pairs: np.ndarray, beta: float) -> np.ndarray:
    return kernels.roi_means(np.ascontiguousarray(edge_mask, dtype=np.float64),
                             np.ascontiguousarray(vertices, dtype=np.float64),
                             np.ascontiguousarray(pairs, dtype=np.int64), beta)


def naive_edges(vertices: np.ndarray, edge_mask: np.ndarray, beta: float,
                tau: float) -> set[tuple[int, int]]:
    """Pairs whose rectangle response strictly exceeds the threshold."""
    pairs = all_pairs(len(vertices))
    if not len(pairs):
        return set()
    eta = pair_responses(edge_mask, vertices, pairs, beta)
    return {(int(i), int(j)) for (i, j), e in zip(pairs, eta) if e > tau}


def _deadzoned(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    out[np.abs(out) < DEAD_ZONE] = 0.0
    return out


def threshold_deltas(near_u: np.ndarray, near_v: np.ndarray) -> np.ndarray:
    """Per-pair threshold step sign from the two endpoint residual reads.

    Both reads negative (extra ink) raises the threshold (+1), both
    positive (missing ink) lowers it (-1); a mixed or dead-zoned pair
    leaves it alone."""
    nu = _deadzoned(np.asarray(near_u, dtype=np.float64))
    nv = _deadzoned(np.asarray(near_v, dtype=np.float64))
    delta = np.zeros(len(nu), dtype=np.float64)
    delta[np.maximum(nu, nv) < 0.0] = 1.0
    delta[np.minimum(nu, nv) > 0.0] = -1.0
    return delta


def feedback_infer(image: np.ndarray, masks: LabelMasks,
                   params: InferParams = InferParams()) -> tuple[SkeletonGraph, FeedbackTrace]:
    """Infer a skeleton graph with per-pair adaptive thresholds.

    Runs exactly i_max update iterations; the trace records the edge set
    before any update and after each one.
    """
    image = np.ascontiguousarray(image, dtype=np.float64)
    size = masks.size
    vertices = extract_vertices(masks.vertex)
    n = len(vertices)
    if n < 2:
        return SkeletonGraph(vertices, set()), FeedbackTrace()

    pairs = all_pairs(n)
    pair_keys = [(int(i), int(j)) for i, j in pairs]
    eta = pair_responses(masks.edge, vertices, pairs, params.beta)
    tau = np.full(len(pairs), params.tau0, dtype=np.float64)
    accepted = eta > tau

    def edge_set(mask: np.ndarray) -> set[tuple[int, int]]:
        return {pair_keys[k] for k in np.flatnonzero(mask)}

    trace = FeedbackTrace(edge_sets=[edge_set(accepted)])
    cverts = np.ascontiguousarray(vertices)
    for _ in range(params.i_max):
        graph_i = SkeletonGraph(vertices, trace.edge_sets[-1])
        rendered = rasterize_graph(graph_i, size, params.render_width)
        resid = np.ascontiguousarray(residual(image, rendered))
        means = kernels.half_roi_means(resid, cverts, pairs, params.beta,
                                       params.vertex_radius)
        delta = threshold_deltas(means[:, 0], means[:, 1])
        tau = np.clip(tau + params.rate * delta, 0.0, 1.0)
        accepted = eta > tau
        trace.edge_sets.append(edge_set(accepted))

    trace.thresholds = {k: float(t) for k, t in zip(pair_keys, tau)}
    trace.responses = {k: float(e) for k, e in zip(pair_keys, eta)}
    graph = SkeletonGraph(vertices, trace.edge_sets[-1])
    return graph, trace


@dataclass
class PremiseStats:
    """Threshold/gap estimates across a sample set, per ROI width."""

    betas: tuple[float, ...]
    records: dict[float, list[tuple[float, float]]]  # beta -> [(tau_hat, gap_hat)]
    skipped: int
    bins: int

    def tau_values(self, beta: float) -> np.ndarray:
        return np.asarray([t for t, _ in self.records[beta]], dtype=np.float64)

    def gap_values(self, beta: float) -> np.ndarray:
        return np.asarray([g for _, g in self.records[beta]], dtype=np.float64)

    def gap_positive_fraction(self, beta: float) -> float:
        gaps = self.gap_values(beta)
        return float((gaps > 0).mean()) if len(gaps) else 0.0

    def histogram(self, beta: float) -> tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.tau_values(beta), bins=self.bins, range=(0.0, 1.0))


def count_peaks(counts: np.ndarray) -> int:
    """Local maxima of a histogram, treating equal-count plateaus as one."""
    compressed = [c for k, c in enumerate(counts) if k == 0 or c != counts[k - 1]]
    peaks = 0
    for k, c in enumerate(compressed):
        left = compressed[k - 1] if k > 0 else -1
        right = compressed[k + 1] if k + 1 < len(compressed) else -1
        if c > left and c > right:
            peaks += 1
    return peaks


def premise_stats(samples: list[Sample], betas: list[float],
                  bins: int = 16) -> PremiseStats:
    """Estimate, per sample and ROI width, the worst accepted-edge response
    (the m-th largest over all pairs, m = true edge count) and its gap over
    the all-pairs mean response."""
    records: dict[float, list[tuple[float, float]]] = {float(b): [] for b in betas}
    skipped = 0
    for sample in samples:
        vertices = sample.graph.vertices
        m = len(sample.graph.edges)
        pairs = all_pairs(len(vertices))
        if len(vertices) < 2 or m == 0 or m > len(pairs):
            skipped += 1
            continue
        for b in betas:
            eta = pair_responses(sample.masks.edge, vertices, pairs, float(b))
            eta_sorted = np.sort(eta)[::-1]
            tau_hat = float(eta_sorted[m - 1])
            gap_hat = tau_hat - float(eta.mean())
            records[float(b)].append((tau_hat, gap_hat))
    return PremiseStats(tuple(float(b) for b in betas), records, skipped, bins)
