"""Kernel backend selection: numba-compiled hot loops or plain numpy.

The hot kernels (subset-orbit union-find, dancing-links search, partition
refinement) are written as numba-compatible functions.  By default they are
compiled with ``numba.njit`` when numba is importable; setting the
environment variable ``TETRAHEX_BACKEND=numpy`` forces the uncompiled
numpy/python path.  ``TETRAHEX_BACKEND=numba`` fails loudly if numba is
missing.  Both paths execute the same source, so results are identical.
"""
from __future__ import annotations

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    numba = None
    HAVE_NUMBA = False


def _select_backend() -> bool:
    value = os.environ.get("TETRAHEX_BACKEND", "auto").strip().lower()
    if value in ("", "auto"):
        return HAVE_NUMBA
    if value in ("numpy", "python"):
        return False
    if value == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError(
                "TETRAHEX_BACKEND=numba requested but numba is not installed"
            )
        return True
    raise ValueError(f"unrecognized TETRAHEX_BACKEND value: {value!r}")


USING_NUMBA = _select_backend()


def jit_kernel(func):
    """Compile ``func`` with njit when the numba backend is active."""
    if USING_NUMBA:
        return numba.njit(cache=True)(func)
    return func
