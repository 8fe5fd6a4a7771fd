"""Tonal-art-map compositing over an illumination image.

A spec pairs ascending illumination breakpoints with tileable hatch
textures.  A pixel multiplies together every texture whose breakpoint is
at or above its illumination, so darker pixels accumulate a superset of
the strokes of lighter ones; pixels brighter than the last breakpoint stay
pure white (empty product) and pixels darker than the black floor clamp to
pure black.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import load_png


@dataclass(frozen=True)
class TamSpec:
    breakpoints: tuple[float, ...]
    textures: tuple[np.ndarray, ...]
    black_floor: float = 0.02

    def __post_init__(self):
        if len(self.breakpoints) != len(self.textures):
            raise ValueError("breakpoint and texture counts differ")
        if len(self.breakpoints) == 0:
            raise ValueError("need at least one texture")
        b = self.breakpoints
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError("breakpoints must be strictly ascending")
        if b[0] <= 0.0 or b[-1] > 1.0:
            raise ValueError("breakpoints must lie in (0, 1]")
        if not 0.0 <= self.black_floor < 1.0:
            raise ValueError("black_floor must lie in [0, 1)")
        textures = tuple(np.asarray(t, dtype=np.float64) for t in self.textures)
        for t in textures:
            if t.ndim != 2 or t.size == 0:
                raise ValueError("textures must be non-empty 2-d arrays")
            if t.min() < 0.0 or t.max() > 1.0:
                raise ValueError("texture values must lie in [0, 1]")
        object.__setattr__(self, "textures", textures)
        object.__setattr__(self, "breakpoints", tuple(float(v) for v in b))


def default_breakpoints(k: int) -> tuple[float, ...]:
    """Evenly spaced levels leaving headroom for a pure-white tone."""
    return tuple((i + 1) / (k + 1) for i in range(k))


def tam_shade(illum: np.ndarray, spec: TamSpec,
              tile_offset: tuple[int, int] = (0, 0),
              invert_inequality: bool = False) -> np.ndarray:
    """Composite the texture ladder over the illumination image.

    Textures tile in screen space, shifted by tile_offset (x, y).  By
    default texture i applies where illum <= breakpoint i; with
    invert_inequality it applies where breakpoint i <= illum instead.
    """
    p = np.asarray(illum, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError("illumination must be a 2-d image")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("illumination values must lie in [0, 1]")
    dx, dy = int(tile_offset[0]), int(tile_offset[1])
    h, w = p.shape
    out = np.ones_like(p)
    for b, tex in zip(spec.breakpoints, spec.textures):
        th, tw = tex.shape
        tile = tex[np.ix_((np.arange(h) + dy) % th, (np.arange(w) + dx) % tw)]
        sel = (b <= p) if invert_inequality else (p <= b)
        out[sel] *= tile[sel]
    out[p < spec.black_floor] = 0.0
    return out


def hatch_texture(size: int = 64, spacing: int = 8, thickness: int = 1,
                  diagonal: bool = True) -> np.ndarray:
    """Procedural hatch tile: dark lines (0) on white (1), seamless."""
    r = np.arange(size)[:, None]
    c = np.arange(size)[None, :]
    coord = (r + c) % spacing if diagonal else r % spacing
    return np.where(coord < thickness, 0.0, 1.0)


def load_textures(directory: str | Path) -> list[np.ndarray]:
    """Texture catalogue: PNGs in lexicographic order, matched to
    breakpoints ascending."""
    paths = sorted(Path(directory).glob("*.png"))
    if not paths:
        raise FileNotFoundError(f"no PNG textures in {directory}")
    return [load_png(p) for p in paths]
