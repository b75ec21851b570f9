"""Kernel backend selection.

The compiled extension is preferred when present; setting the environment
variable INFOFLOW_PURE_PYTHON=1 forces the pure-Python fallback (used by the
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("INFOFLOW_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

euler_path_2d = _impl.euler_path_2d


def available_backends() -> dict[str, object]:
    """Map backend name -> kernel function, for benchmarks and tests."""
    backends: dict[str, object] = {"python": _kernels_py.euler_path_2d}
    try:
        from . import _kernels

        backends["compiled"] = _kernels.euler_path_2d
    except ImportError:
        pass
    return backends
