"""Pure-numpy twins of the compiled kernels.

Same per-pixel arithmetic as ``_kernels.pyx`` (bounding boxes, membership
predicates, clamps), so both backends agree bit-for-bit on binary masks and
to float rounding on real-valued ones.
"""

from __future__ import annotations

import math

import numpy as np


def _clipped_bbox(x_lo: float, x_hi: float, y_lo: float, y_hi: float,
                  pad: float, w: int, h: int):
    c0 = max(0, int(math.ceil(x_lo - pad)))
    c1 = min(w - 1, int(math.floor(x_hi + pad)))
    r0 = max(0, int(math.ceil(y_lo - pad)))
    r1 = min(h - 1, int(math.floor(y_hi + pad)))
    return c0, c1, r0, r1


def rasterize_segments(segments: np.ndarray, size: int, half_width: float) -> np.ndarray:
    """Mark pixels whose center lies within half_width of any segment."""
    out = np.zeros((size, size), dtype=np.uint8)
    hw2 = half_width * half_width
    for x1, y1, x2, y2 in segments:
        ex = x2 - x1
        ey = y2 - y1
        ee = ex * ex + ey * ey
        c0, c1, r0, r1 = _clipped_bbox(min(x1, x2), max(x1, x2),
                                       min(y1, y2), max(y1, y2),
                                       half_width, size, size)
        if c1 < c0 or r1 < r0:
            continue
        px = np.arange(c0, c1 + 1, dtype=np.float64)[None, :]
        py = np.arange(r0, r1 + 1, dtype=np.float64)[:, None]
        if ee > 0.0:
            t = np.clip(((px - x1) * ex + (py - y1) * ey) / ee, 0.0, 1.0)
        else:
            t = np.zeros((r1 - r0 + 1, c1 - c0 + 1), dtype=np.float64)
        dx = px - (x1 + t * ex)
        dy = py - (y1 + t * ey)
        hit = dx * dx + dy * dy <= hw2
        out[r0:r1 + 1, c0:c1 + 1] |= hit.astype(np.uint8)
    return out


def _roi_membership(ux, uy, vx, vy, beta, w, h):
    """Pixel-center membership grid for one pair ROI, plus its bbox."""
    hb = beta / 2.0
    ex = vx - ux
    ey = vy - uy
    ee = ex * ex + ey * ey
    c0, c1, r0, r1 = _clipped_bbox(min(ux, vx), max(ux, vx),
                                   min(uy, vy), max(uy, vy), hb, w, h)
    if c1 < c0 or r1 < r0:
        return None
    px = np.arange(c0, c1 + 1, dtype=np.float64)[None, :]
    py = np.arange(r0, r1 + 1, dtype=np.float64)[:, None]
    ax = px - ux
    ay = py - uy
    along = ax * ex + ay * ey
    cross = ax * ey - ay * ex
    inside = (along >= 0.0) & (along <= ee) & (cross * cross <= hb * hb * ee)
    return inside, along, ax, ay, px - vx, py - vy, ee, (r0, r1, c0, c1)


def roi_means(mask: np.ndarray, vertices: np.ndarray, pairs: np.ndarray,
              beta: float) -> np.ndarray:
    """Mean mask value over the beta-wide rectangle spanning each vertex pair."""
    h, w = mask.shape
    out = np.zeros(len(pairs), dtype=np.float64)
    for k, (i, j) in enumerate(pairs):
        m = _roi_membership(vertices[i, 0], vertices[i, 1],
                            vertices[j, 0], vertices[j, 1], beta, w, h)
        if m is None:
            continue
        inside, _, _, _, _, _, _, (r0, r1, c0, c1) = m
        count = int(inside.sum())
        if count > 0:
            out[k] = float(mask[r0:r1 + 1, c0:c1 + 1][inside].sum()) / count
    return out


def half_roi_means(image: np.ndarray, vertices: np.ndarray, pairs: np.ndarray,
                   beta: float, exclude_radius: float) -> np.ndarray:
    """Mean image value over each endpoint-disk-free half of the pair ROI."""
    h, w = image.shape
    xr2 = exclude_radius * exclude_radius
    out = np.zeros((len(pairs), 2), dtype=np.float64)
    for k, (i, j) in enumerate(pairs):
        m = _roi_membership(vertices[i, 0], vertices[i, 1],
                            vertices[j, 0], vertices[j, 1], beta, w, h)
        if m is None:
            continue
        inside, along, ax, ay, bx, by, ee, (r0, r1, c0, c1) = m
        keep = inside & (ax * ax + ay * ay > xr2) & (bx * bx + by * by > xr2)
        tile = image[r0:r1 + 1, c0:c1 + 1]
        near_u = keep & (along <= ee / 2.0)
        near_v = keep & (along > ee / 2.0)
        cu = int(near_u.sum())
        cv = int(near_v.sum())
        if cu > 0:
            out[k, 0] = float(tile[near_u].sum()) / cu
        if cv > 0:
            out[k, 1] = float(tile[near_v].sum()) / cv
    return out
