"""Backend selection for the hot kernels.

The compiled extension is preferred when it imported cleanly; the numpy
fallback is always available.  Set SKETCHGRAPH_BACKEND=python to force the
fallback (e.g. for benchmarking) or =compiled to fail loudly when the
extension is missing.
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _kernels
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None

_choice = os.environ.get("SKETCHGRAPH_BACKEND", "auto")
if _choice == "python":
    _impl = _fallback
elif _choice == "compiled":
    if _kernels is None:
        raise ImportError("SKETCHGRAPH_BACKEND=compiled but the extension is not built")
    _impl = _kernels
elif _choice == "auto":
    _impl = _kernels if _kernels is not None else _fallback
else:
    raise ValueError(f"unknown SKETCHGRAPH_BACKEND {_choice!r}")

BACKEND = "compiled" if _impl is _kernels else "python"

rasterize_segments = _impl.rasterize_segments
roi_means = _impl.roi_means
half_roi_means = _impl.half_roi_means
