"""sketchgraph: raster line drawings to skeleton graphs, pen strokes, and
plotter instructions, with the synthetic dataset and loss functions used
to train and validate the pipeline."""

from .core import Point, Sketch, SkeletonGraph, Stroke, rasterize, residual
from .infer import InferParams, extract_vertices, feedback_infer, naive_edges, roi_response
from .intersect import find_intersections
from .loss import class_weights, xent_loss
from .synth import (
    AugmentParams,
    LabelMasks,
    Sample,
    augment,
    build_ground_truth,
    degrade_masks,
    normalize_sketch,
    parse_sketch_ndjson,
)
from .toolpath import PlateTransform, StrokeSequence, emit_gcode, emit_svg, fit_to_plate, strokes_from_graph

__version__ = "0.1.0"

__all__ = [
    "Point", "Stroke", "Sketch", "SkeletonGraph", "rasterize", "residual",
    "find_intersections", "parse_sketch_ndjson", "normalize_sketch",
    "build_ground_truth", "augment", "degrade_masks", "AugmentParams",
    "LabelMasks", "Sample", "class_weights", "xent_loss", "InferParams",
    "extract_vertices", "roi_response", "naive_edges", "feedback_infer",
    "StrokeSequence", "PlateTransform", "strokes_from_graph", "fit_to_plate",
    "emit_gcode", "emit_svg", "__version__",
]
