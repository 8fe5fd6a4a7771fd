"""Stroke extraction and emitters: hand-executed fixtures, conservation,
plate mapping, exact templates."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchgraph.core import SkeletonGraph
from sketchgraph.toolpath import (
    PlateTransform,
    emit_gcode,
    emit_svg,
    fit_to_plate,
    graph_bbox,
    strokes_from_graph,
)


def grid_graph(n, edges):
    verts = np.array([[10.0 * (k + 1), 20.0 * (k + 1)] for k in range(n)])
    return SkeletonGraph(verts, set(edges))


# --- stroke extraction -------------------------------------------------------

def test_no_edges_yields_no_strokes():
    seq = strokes_from_graph(grid_graph(3, []))
    assert seq.paths == []


def test_path_graph():
    seq = strokes_from_graph(grid_graph(3, [(0, 1), (1, 2)]))
    assert seq.paths == [[0, 1, 2]]


def test_triangle_closes_loop():
    seq = strokes_from_graph(grid_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert seq.paths == [[0, 1, 2, 0]]


def test_star_splits_into_spokes():
    seq = strokes_from_graph(grid_graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)]))
    assert seq.paths == [[0, 1], [0, 2], [0, 3], [0, 4]]


def test_disconnected_components_covered():
    seq = strokes_from_graph(grid_graph(5, [(0, 1), (2, 3), (3, 4)]))
    assert seq.paths == [[0, 1], [2, 3, 4]]


def test_edge_conservation_fixture():
    g = grid_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (1, 4)])
    seq = strokes_from_graph(g)
    assert seq.edge_multiset() == sorted(g.edges)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_edge_conservation_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 51))
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    take = rng.random(len(all_pairs)) < 0.1
    edges = {p for p, t in zip(all_pairs, take) if t}
    g = grid_graph(n, edges)
    seq = strokes_from_graph(g)
    assert seq.edge_multiset() == sorted(edges)
    for path in seq.paths:
        assert len(path) >= 2


# --- plate mapping -----------------------------------------------------------

def test_fit_square_canvas():
    t = fit_to_plate((0.0, 0.0, 256.0, 256.0))
    assert t.scale == 0.25
    assert t.apply((0.0, 0.0)) == (25.0, 25.0)
    assert t.apply((256.0, 256.0)) == (89.0, 89.0)


def test_fit_wide_bbox_centers_y():
    t = fit_to_plate((0.0, 0.0, 256.0, 128.0))
    assert t.scale == 0.25
    assert t.apply((0.0, 0.0)) == (25.0, 41.0)
    assert t.apply((256.0, 128.0)) == (89.0, 73.0)


def test_fit_degenerate_bbox_lands_mid_plate():
    t = fit_to_plate((100.0, 40.0, 100.0, 40.0))
    assert t.scale == 1.0
    assert t.apply((100.0, 40.0)) == (57.0, 57.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_fit_random_bboxes_stay_on_plate(seed):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(-100, 100, 2)
    span = rng.uniform(0.1, 500, 2)
    bbox = (lo[0], lo[1], lo[0] + span[0], lo[1] + span[1])
    t = fit_to_plate(bbox)
    for corner in [(bbox[0], bbox[1]), (bbox[2], bbox[3]),
                   (bbox[0], bbox[3]), (bbox[2], bbox[1])]:
        x, y = t.apply(corner)
        assert 25.0 - 1e-9 <= x <= 89.0 + 1e-9
        assert 25.0 - 1e-9 <= y <= 89.0 + 1e-9


def test_graph_bbox():
    g = grid_graph(3, [])
    assert graph_bbox(g) == (10.0, 20.0, 30.0, 60.0)
    with pytest.raises(ValueError):
        graph_bbox(SkeletonGraph(np.zeros((0, 2)), set()))


# --- GCODE -------------------------------------------------------------------

def test_gcode_single_stroke_template():
    g = SkeletonGraph(np.array([[0.0, 0.0], [256.0, 256.0]]), {(0, 1)})
    seq = strokes_from_graph(g)
    text = emit_gcode(seq, g.vertices, fit_to_plate(graph_bbox(g)))
    assert text.splitlines() == [
        "G00 Z-5",
        "X25.00 Y25.00",
        "G01 Z0",
        "X89.00 Y89.00",
        "G00 Z-5",
    ]
    assert text.endswith("\n")


def test_gcode_empty_sequence_is_single_disengage():
    g = SkeletonGraph(np.zeros((2, 2)), set())
    seq = strokes_from_graph(g)
    text = emit_gcode(seq, g.vertices, PlateTransform(1.0, (57.0, 57.0)))
    assert text == "G00 Z-5\n"


def test_gcode_engage_disengage_counts():
    g = grid_graph(4, [(0, 1), (2, 3)])
    seq = strokes_from_graph(g)
    text = emit_gcode(seq, g.vertices, fit_to_plate(graph_bbox(g)))
    lines = text.splitlines()
    assert lines.count("G01 Z0") == 2
    assert lines.count("G00 Z-5") == 3


def test_gcode_coordinates_in_plate_box():
    rng = np.random.default_rng(13)
    verts = rng.uniform(0, 256, (12, 2))
    edges = {(i, i + 1) for i in range(11)}
    g = SkeletonGraph(verts, edges)
    seq = strokes_from_graph(g)
    text = emit_gcode(seq, g.vertices, fit_to_plate(graph_bbox(g)))
    for line in text.splitlines():
        if line.startswith("X"):
            x, y = (float(tok[1:]) for tok in line.split())
            assert 25.0 <= x <= 89.0
            assert 25.0 <= y <= 89.0


def test_gcode_invalid_vertex_id():
    from sketchgraph.toolpath import StrokeSequence

    g = grid_graph(2, [(0, 1)])
    seq = StrokeSequence([[0, 5]], g)
    with pytest.raises(ValueError, match="invalid vertex id"):
        emit_gcode(seq, g.vertices, PlateTransform(1.0, (25.0, 25.0)))


# --- SVG ---------------------------------------------------------------------

def test_svg_path_template():
    g = SkeletonGraph(np.array([[1.0, 2.0], [3.0, 4.0]]), {(0, 1)})
    seq = strokes_from_graph(g)
    text = emit_svg(seq, g.vertices, 256)
    assert '<path d="M 1 2 L 3 4" />' in text
    assert 'width="256" height="256"' in text


def test_svg_empty_document_has_no_paths():
    g = SkeletonGraph(np.zeros((2, 2)), set())
    text = emit_svg(strokes_from_graph(g), g.vertices, 128)
    assert "<path" not in text
    assert text.startswith("<?xml")


def test_svg_stroke_order_and_count():
    g = grid_graph(6, [(0, 1), (2, 3), (4, 5)])
    text = emit_svg(strokes_from_graph(g), g.vertices, 256)
    paths = [line for line in text.splitlines() if line.startswith("<path")]
    assert len(paths) == 3
    assert paths[0] == '<path d="M 10 20 L 20 40" />'
    assert paths[1] == '<path d="M 30 60 L 40 80" />'
    assert paths[2] == '<path d="M 50 100 L 60 120" />'


def test_svg_subpixel_coordinates():
    g = SkeletonGraph(np.array([[1.5, 2.25], [3.0, 4.0]]), {(0, 1)})
    text = emit_svg(strokes_from_graph(g), g.vertices, 64)
    assert '<path d="M 1.5 2.25 L 3 4" />' in text


def test_emitters_deterministic():
    g = grid_graph(5, [(0, 1), (1, 2), (3, 4)])
    seq = strokes_from_graph(g)
    t = fit_to_plate(graph_bbox(g))
    assert emit_gcode(seq, g.vertices, t) == emit_gcode(seq, g.vertices, t)
    assert emit_svg(seq, g.vertices, 256) == emit_svg(seq, g.vertices, 256)
