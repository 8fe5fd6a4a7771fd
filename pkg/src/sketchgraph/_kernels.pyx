# cython: language_level=3
"""Compiled inner loops: segment rasterization and rectangular ROI statistics.

Each function mirrors its twin in ``_fallback`` operation for operation;
the membership predicates are identical so the two backends agree
bit-for-bit on binary masks.  The ROI scans narrow each row to a
conservative column window solved from the rectangle's linear constraints
(then re-apply the exact predicate), which keeps long diagonal pairs from
degenerating into full bounding-box scans.
"""

import numpy as np

cimport cython
from libc.math cimport ceil, floor, sqrt


@cython.boundscheck(False)
@cython.wraparound(False)
def rasterize_segments(double[:, ::1] segments, int size, double half_width):
    """Mark pixels whose center lies within half_width of any segment.

    segments: (m, 4) rows (x1, y1, x2, y2); degenerate rows draw a dot.
    Pixel centers sit at integer coordinates; returns uint8 (size, size).
    """
    out = np.zeros((size, size), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef double hw2 = half_width * half_width
    cdef double x1, y1, x2, y2, ex, ey, ee, t, dx, dy, px, py
    cdef double ry, wlo, whi, q0, q1
    cdef Py_ssize_t i, r, c, r0, r1, c0, c1, ca, cb
    cdef Py_ssize_t m = segments.shape[0]

    for i in range(m):
        x1 = segments[i, 0]
        y1 = segments[i, 1]
        x2 = segments[i, 2]
        y2 = segments[i, 3]
        ex = x2 - x1
        ey = y2 - y1
        ee = ex * ex + ey * ey

        c0 = <Py_ssize_t>ceil(min(x1, x2) - half_width)
        c1 = <Py_ssize_t>floor(max(x1, x2) + half_width)
        r0 = <Py_ssize_t>ceil(min(y1, y2) - half_width)
        r1 = <Py_ssize_t>floor(max(y1, y2) + half_width)
        if c0 < 0:
            c0 = 0
        if r0 < 0:
            r0 = 0
        if c1 > size - 1:
            c1 = size - 1
        if r1 > size - 1:
            r1 = size - 1

        for r in range(r0, r1 + 1):
            py = <double>r
            # conservative column window: the disk of radius half_width
            # around the segment, restricted to this row, spans at most
            # [proj - hw, proj + hw] around the row's nearest-point x-range
            ry = py - y1
            wlo = <double>c0
            whi = <double>c1
            if ey != 0.0:
                # x of the segment point at the row, +- slack for width
                q0 = x1 + (ry - half_width * 2.0) * ex / ey
                q1 = x1 + (ry + half_width * 2.0) * ex / ey
                if q0 > q1:
                    q0, q1 = q1, q0
                q0 -= half_width * 2.0
                q1 += half_width * 2.0
                if q0 > wlo:
                    wlo = q0
                if q1 < whi:
                    whi = q1
            ca = <Py_ssize_t>ceil(wlo - 1.0)
            cb = <Py_ssize_t>floor(whi + 1.0)
            if ca < c0:
                ca = c0
            if cb > c1:
                cb = c1
            for c in range(ca, cb + 1):
                px = <double>c
                if ee > 0.0:
                    t = ((px - x1) * ex + (py - y1) * ey) / ee
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                dx = px - (x1 + t * ex)
                dy = py - (y1 + t * ey)
                if dx * dx + dy * dy <= hw2:
                    o[r, c] = 1
    return out


cdef inline bint _row_window(double ux, double ex, double ey, double ee,
                             double ry, double wcross,
                             Py_ssize_t c0, Py_ssize_t c1,
                             Py_ssize_t *ca, Py_ssize_t *cb) nogil:
    """Conservative column window for one row of a pair rectangle.

    Solves 0 <= (c-ux)*ex + ry*ey <= ee and |(c-ux)*ey - ry*ex| <= wcross
    for c where the coefficient is nonzero; rows failing a c-independent
    constraint return False.  The window is widened by one pixel; callers
    re-apply the exact predicate.
    """
    cdef double lo = <double>c0
    cdef double hi = <double>c1
    cdef double a, b

    if ey != 0.0:
        a = (ry * ex - wcross) / ey + ux
        b = (ry * ex + wcross) / ey + ux
        if a > b:
            a, b = b, a
        if a > lo:
            lo = a
        if b < hi:
            hi = b
    else:
        if ry * ex > wcross or ry * ex < -wcross:
            return False

    if ex != 0.0:
        a = (-ry * ey) / ex + ux
        b = (ee - ry * ey) / ex + ux
        if a > b:
            a, b = b, a
        if a > lo:
            lo = a
        if b < hi:
            hi = b
    else:
        if ry * ey < 0.0 or ry * ey > ee:
            return False

    ca[0] = <Py_ssize_t>ceil(lo - 1.0)
    cb[0] = <Py_ssize_t>floor(hi + 1.0)
    if ca[0] < c0:
        ca[0] = c0
    if cb[0] > c1:
        cb[0] = c1
    return ca[0] <= cb[0]


@cython.boundscheck(False)
@cython.wraparound(False)
def roi_means(double[:, ::1] mask, double[:, ::1] vertices,
              long[:, ::1] pairs, double beta):
    """Mean mask value over the beta-wide rectangle spanning each vertex pair.

    Membership: pixel center p with a = p - u satisfies
    0 <= a.d <= |d|^2 and (a x d)^2 <= (beta/2)^2 |d|^2 for d = v - u.
    A rectangle covering no pixel centers scores 0.
    """
    cdef Py_ssize_t n = pairs.shape[0]
    cdef Py_ssize_t h = mask.shape[0]
    cdef Py_ssize_t w = mask.shape[1]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double hb = beta / 2.0
    cdef double ux, uy, vx, vy, ex, ey, ee, lim, wcross, ax, ay, along, cross
    cdef double total, ry
    cdef Py_ssize_t k, r, c, r0, r1, c0, c1, ca, cb, count

    for k in range(n):
        ux = vertices[pairs[k, 0], 0]
        uy = vertices[pairs[k, 0], 1]
        vx = vertices[pairs[k, 1], 0]
        vy = vertices[pairs[k, 1], 1]
        ex = vx - ux
        ey = vy - uy
        ee = ex * ex + ey * ey
        lim = hb * hb * ee
        wcross = hb * sqrt(ee) * 1.0000000001 + 1e-12

        c0 = <Py_ssize_t>ceil(min(ux, vx) - hb)
        c1 = <Py_ssize_t>floor(max(ux, vx) + hb)
        r0 = <Py_ssize_t>ceil(min(uy, vy) - hb)
        r1 = <Py_ssize_t>floor(max(uy, vy) + hb)
        if c0 < 0:
            c0 = 0
        if r0 < 0:
            r0 = 0
        if c1 > w - 1:
            c1 = w - 1
        if r1 > h - 1:
            r1 = h - 1

        total = 0.0
        count = 0
        for r in range(r0, r1 + 1):
            ry = <double>r - uy
            if not _row_window(ux, ex, ey, ee, ry, wcross, c0, c1, &ca, &cb):
                continue
            for c in range(ca, cb + 1):
                ax = <double>c - ux
                ay = ry
                along = ax * ex + ay * ey
                if along < 0.0 or along > ee:
                    continue
                cross = ax * ey - ay * ex
                if cross * cross <= lim:
                    total += mask[r, c]
                    count += 1
        if count > 0:
            o[k] = total / <double>count
    return out


@cython.boundscheck(False)
@cython.wraparound(False)
def half_roi_means(double[:, ::1] image, double[:, ::1] vertices,
                   long[:, ::1] pairs, double beta, double exclude_radius):
    """Mean image value over each half of the pair ROI, split at the midline.

    The half nearer u takes pixels with a.d <= |d|^2/2, the other half the
    rest.  Pixels within exclude_radius of either endpoint are dropped from
    both halves.  Empty halves score 0.  Returns (n, 2) [near-u, near-v].
    """
    cdef Py_ssize_t n = pairs.shape[0]
    cdef Py_ssize_t h = image.shape[0]
    cdef Py_ssize_t w = image.shape[1]
    out = np.zeros((n, 2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double hb = beta / 2.0
    cdef double xr2 = exclude_radius * exclude_radius
    cdef double ux, uy, vx, vy, ex, ey, ee, lim, wcross, ax, ay, bx, by
    cdef double along, cross, tu, tv, ry
    cdef Py_ssize_t k, r, c, r0, r1, c0, c1, ca, cb, cu, cv

    for k in range(n):
        ux = vertices[pairs[k, 0], 0]
        uy = vertices[pairs[k, 0], 1]
        vx = vertices[pairs[k, 1], 0]
        vy = vertices[pairs[k, 1], 1]
        ex = vx - ux
        ey = vy - uy
        ee = ex * ex + ey * ey
        lim = hb * hb * ee
        wcross = hb * sqrt(ee) * 1.0000000001 + 1e-12

        c0 = <Py_ssize_t>ceil(min(ux, vx) - hb)
        c1 = <Py_ssize_t>floor(max(ux, vx) + hb)
        r0 = <Py_ssize_t>ceil(min(uy, vy) - hb)
        r1 = <Py_ssize_t>floor(max(uy, vy) + hb)
        if c0 < 0:
            c0 = 0
        if r0 < 0:
            r0 = 0
        if c1 > w - 1:
            c1 = w - 1
        if r1 > h - 1:
            r1 = h - 1

        tu = 0.0
        tv = 0.0
        cu = 0
        cv = 0
        for r in range(r0, r1 + 1):
            ry = <double>r - uy
            if not _row_window(ux, ex, ey, ee, ry, wcross, c0, c1, &ca, &cb):
                continue
            for c in range(ca, cb + 1):
                ax = <double>c - ux
                ay = ry
                along = ax * ex + ay * ey
                if along < 0.0 or along > ee:
                    continue
                cross = ax * ey - ay * ex
                if cross * cross > lim:
                    continue
                if ax * ax + ay * ay <= xr2:
                    continue
                bx = <double>c - vx
                by = <double>r - vy
                if bx * bx + by * by <= xr2:
                    continue
                if along <= ee / 2.0:
                    tu += image[r, c]
                    cu += 1
                else:
                    tv += image[r, c]
                    cv += 1
        if cu > 0:
            o[k, 0] = tu / <double>cu
        if cv > 0:
            o[k, 1] = tv / <double>cv
    return out
