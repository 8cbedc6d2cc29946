"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``ABGROWTH_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels
from ._pykernels import CapExceeded

python = _pykernels
compiled = None
if not os.environ.get("ABGROWTH_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else python
BACKEND = "cython" if active is compiled else "python"


def use(backend: str) -> None:
    """Switch the active kernels at runtime ("cython" or "python")."""
    global active, BACKEND
    if backend == "python":
        active = python
    elif backend == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        active = compiled
    else:
        raise ValueError(f"unknown backend {backend!r}")
    BACKEND = backend


def bfs_ball(*args, **kwargs):
    return active.bfs_ball(*args, **kwargs)


def max_offset_distance(*args, **kwargs):
    return active.max_offset_distance(*args, **kwargs)


__all__ = ["CapExceeded", "BACKEND", "bfs_ball", "max_offset_distance", "use"]
