"""Graph-recovery metrics: vertex matching and edge F1 against a
reference graph."""

from __future__ import annotations

import numpy as np

from .core import SkeletonGraph, normalize_edge


def match_vertices(reference: np.ndarray, candidate: np.ndarray,
                   tol: float) -> dict[int, int]:
    """Greedy one-to-one matching of candidate points onto reference points
    within the tolerance, nearest pairs first.  Returns candidate index ->
    reference index."""
    if len(reference) == 0 or len(candidate) == 0:
        return {}
    diff = candidate[:, None, :] - reference[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    order = np.argsort(dist, axis=None, kind="stable")
    matched: dict[int, int] = {}
    used_ref: set[int] = set()
    for flat in order:
        ci, ri = divmod(int(flat), len(reference))
        if dist[ci, ri] > tol:
            break
        if ci in matched or ri in used_ref:
            continue
        matched[ci] = ri
        used_ref.add(ri)
    return matched


def edge_f1(reference: SkeletonGraph, candidate: SkeletonGraph,
            tol: float = 1.0) -> float:
    """F1 of candidate edges against reference edges after mapping
    candidate vertices onto reference vertices within the tolerance.
    Candidate edges with an unmatched endpoint count as false positives."""
    mapping = match_vertices(reference.vertices, candidate.vertices, tol)
    ref_edges = set(reference.edges)
    mapped: set[tuple[int, int]] = set()
    unmatched = 0
    for u, v in candidate.edges:
        if u in mapping and v in mapping:
            mapped.add(normalize_edge(mapping[u], mapping[v]))
        else:
            unmatched += 1
    tp = len(mapped & ref_edges)
    fp = len(mapped - ref_edges) + unmatched
    fn = len(ref_edges - mapped)
    denom = 2 * tp + fp + fn
    return 1.0 if denom == 0 else 2.0 * tp / denom


def all_vertices_matched(reference: SkeletonGraph, candidate: SkeletonGraph,
                         tol: float = 1.0) -> bool:
    """True when every reference vertex has a candidate match within tol."""
    mapping = match_vertices(reference.vertices, candidate.vertices, tol)
    return len(set(mapping.values())) == len(reference.vertices)
