"""Deterministic fixture sketches shared by emitter and golden-file tests."""

from __future__ import annotations

import numpy as np

from sketchgraph.core import Sketch, Stroke


def _sketch(*point_lists, size=256):
    return Sketch(tuple(Stroke(np.asarray(p, dtype=np.float64)) for p in point_lists),
                  size)


def square_sketch() -> Sketch:
    return _sketch([[60, 60], [196, 60], [196, 196], [60, 196], [60, 60]])


def cross_sketch() -> Sketch:
    return _sketch([[40, 40], [216, 216]], [[40, 216], [216, 40]])


def star_sketch() -> Sketch:
    """Five spokes radiating from a hub."""
    center = np.array([128.0, 128.0])
    spokes = []
    for k in range(5):
        angle = 2 * np.pi * k / 5 - np.pi / 2
        tip = center + 90 * np.array([np.cos(angle), np.sin(angle)])
        spokes.append([center.tolist(), tip.tolist()])
    return _sketch(*spokes)


def zigzag_sketch() -> Sketch:
    return _sketch([[30, 200], [80, 80], [130, 200], [180, 80], [230, 200]])


def ell_sketch() -> Sketch:
    return _sketch([[60, 40], [60, 200], [200, 200]], [[110, 40], [110, 120]])


def all_fixture_sketches() -> dict[str, Sketch]:
    return {
        "square": square_sketch(),
        "cross": cross_sketch(),
        "star": star_sketch(),
        "zigzag": zigzag_sketch(),
        "ell": ell_sketch(),
    }
