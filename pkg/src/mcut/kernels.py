"""Backend selection for the hot kernels.

The compiled extension is used when importable; setting ``MCUT_PURE_PYTHON=1``
forces the pure-Python twin. Both produce bit-identical results.
"""
import os

from mcut import _pykernels

if os.environ.get("MCUT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from mcut import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

dijkstra = _impl.dijkstra
sweep_radius = _impl.sweep_radius
gk_multiflow = _impl.gk_multiflow

__all__ = ["BACKEND", "dijkstra", "sweep_radius", "gk_multiflow"]
