"""Kernel backend selection.

The hot numeric loops (see-saw alternation, coplanar grid scan) exist in
two semantically identical variants: numba-compiled (``_kernels_numba``)
and pure numpy (``_kernels_numpy``).  The environment variable
``PMST_BACKEND`` picks one at import time:

    PMST_BACKEND=numba   force the compiled kernels (error if unavailable)
    PMST_BACKEND=numpy   force the pure-numpy fallback
    PMST_BACKEND=auto    compiled if numba imports, fallback otherwise

``PMST_THREADS`` caps the compiled kernels' thread count (default:
hardware concurrency).  ``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os
import warnings

_active_module = None
_active_name = ""


def _load(name: str):
    if name == "numba":
        # Benign on hosts with an old TBB; numba falls back to another layer.
        warnings.filterwarnings("ignore", message=".*TBB.*")
        from . import _kernels_numba as module

        threads = os.environ.get("PMST_THREADS")
        if threads:
            import numba

            numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
        return module
    from . import _kernels_numpy as module

    return module


def use_backend(name: str = "auto") -> str:
    """Select the kernel backend; returns the name actually in use."""
    global _active_module, _active_name
    if name not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}; use auto, numba or numpy")
    if name == "auto":
        try:
            _active_module = _load("numba")
            _active_name = "numba"
        except ImportError:
            warnings.warn("numba unavailable, falling back to numpy kernels")
            _active_module = _load("numpy")
            _active_name = "numpy"
    else:
        _active_module = _load(name)
        _active_name = name
    return _active_name


def backend_name() -> str:
    return _active_name


def seesaw_batch(w, v0, max_sweeps: int = 500, tol: float = 1e-12,
                 allow_degenerate: bool = True):
    return _active_module.seesaw_batch(w, v0, max_sweeps, tol, allow_degenerate)


def real_grid_scan(w, n_steps: int):
    return _active_module.real_grid_scan(w, n_steps)


use_backend(os.environ.get("PMST_BACKEND", "auto"))
