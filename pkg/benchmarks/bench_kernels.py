#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot operations on a representative inference workload
(a mid-size sketch graph on a 256 px canvas) and prints a speedup table.

Run:  python benchmarks/bench_kernels.py [--size 256] [--vertices 60]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sketchgraph import _fallback

try:
    from sketchgraph import _kernels
except ImportError:
    _kernels = None


def build_workload(size: int, n_vertices: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    vertices = np.ascontiguousarray(rng.uniform(8, size - 8, (n_vertices, 2)))
    pairs = np.asarray([(i, j) for i in range(n_vertices)
                        for j in range(i + 1, n_vertices)], dtype=np.int64)
    segments = np.ascontiguousarray(
        np.hstack([rng.uniform(8, size - 8, (80, 2)),
                   rng.uniform(8, size - 8, (80, 2))]))
    mask = np.ascontiguousarray((rng.random((size, size)) < 0.1).astype(np.float64))
    resid = np.ascontiguousarray(rng.uniform(-1, 1, (size, size)))
    return vertices, pairs, segments, mask, resid


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--vertices", type=int, default=60)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    vertices, pairs, segments, mask, resid = build_workload(args.size, args.vertices)
    print(f"workload: {args.size}px canvas, {len(vertices)} vertices "
          f"({len(pairs)} pairs), {len(segments)} segments\n")

    cases = [
        ("rasterize_segments",
         lambda m: m.rasterize_segments(segments, args.size, 1.0)),
        ("roi_means",
         lambda m: m.roi_means(mask, vertices, pairs, 1.8)),
        ("half_roi_means",
         lambda m: m.half_roi_means(resid, vertices, pairs, 1.8, 3.0)),
    ]

    header = f"{'kernel':<22} {'python':>10} {'compiled':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_py = timeit(lambda: call(_fallback), args.repeats)
        if _kernels is None:
            print(f"{name:<22} {t_py * 1e3:9.2f}ms {'n/a':>10} {'n/a':>9}")
            continue
        t_c = timeit(lambda: call(_kernels), args.repeats)
        a = call(_kernels)
        b = call(_fallback)
        assert np.allclose(a, b, atol=1e-12), f"{name}: backends disagree"
        print(f"{name:<22} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms "
              f"{t_py / t_c:8.1f}x")

    if _kernels is None:
        print("\ncompiled extension not built; showing fallback only")


if __name__ == "__main__":
    main()
