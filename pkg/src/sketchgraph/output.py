"""Artifact writing with temp-then-rename discipline.

Every writer lands the complete file via os.replace so a failing stage
never leaves a partially written artifact behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import SkeletonGraph, save_mask_png, save_png
from .synth import LabelMasks, Sample


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_png(path: str | Path, image: np.ndarray, rgb=None) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.",
                               suffix=".png")
    os.close(fd)
    try:
        if rgb is None:
            save_png(image, tmp)
        else:
            save_mask_png(rgb, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def graph_json(graph: SkeletonGraph) -> str:
    return json.dumps(graph.to_json_dict(), sort_keys=True) + "\n"


def write_graph(path: str | Path, graph: SkeletonGraph) -> None:
    atomic_write_text(path, graph_json(graph))


def load_graph(path: str | Path) -> SkeletonGraph:
    return SkeletonGraph.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_sample(out_dir: str | Path, stem: str, sample: Sample) -> list[str]:
    """Write <stem>_input.png, <stem>_masks.png, <stem>_graph.json; returns
    the file names."""
    out_dir = Path(out_dir)
    names = [f"{stem}_input.png", f"{stem}_masks.png", f"{stem}_graph.json"]
    atomic_write_png(out_dir / names[0], sample.image)
    atomic_write_png(out_dir / names[1], None,
                     rgb=(sample.masks.vertex, sample.masks.edge, sample.masks.background))
    atomic_write_text(out_dir / names[2], graph_json(sample.graph))
    return names


def load_masks(path: str | Path) -> LabelMasks:
    from .core import load_mask_png

    vertex, edge, background = load_mask_png(path)
    return LabelMasks(vertex, edge, background, vertex.shape[0])


def write_manifest(out_dir: str | Path, payload: dict) -> None:
    atomic_write_text(Path(out_dir) / "manifest.json",
                      json.dumps(payload, indent=2, sort_keys=True) + "\n")
