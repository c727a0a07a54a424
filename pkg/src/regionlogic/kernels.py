"""Pixel-kernel dispatch.

Prefers the compiled extension (built from _kernels.pyx) and falls back to
the numpy implementation when it is missing. Set REGIONLOGIC_PURE=1 to force
the fallback, e.g. for benchmarking or debugging.

Contracts shared by both implementations:
  - ``image``: uint8, shape (H, W, 3), C-contiguous
  - ``labels``: int32, shape (H, W), C-contiguous, values in 0..n_labels
  - ``keep``: uint8, shape (n_labels + 1,)
  - ``mask``: uint8 (or bool), shape (H, W), C-contiguous
"""

import os

if os.environ.get("REGIONLOGIC_PURE"):
    from . import _kernels_py as _impl

    IMPLEMENTATION = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        IMPLEMENTATION = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        IMPLEMENTATION = "pure"

compose_fill = _impl.compose_fill
label_histogram = _impl.label_histogram
masked_label_histogram = _impl.masked_label_histogram
