"""Kernel backend selection.

The active-set LP walk in ``lp.py`` dominates the runtime of every
square-function evaluation, so it is compiled with numba when available.
Set ``INTRINSQ_BACKEND=numpy`` to run the identical code interpreted as
plain numpy/Python; ``benchmarks/bench_lp.py`` times the two paths against
each other.
"""

from __future__ import annotations

import os

_requested = os.environ.get("INTRINSQ_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise RuntimeError(
        "INTRINSQ_BACKEND must be 'numba' or 'numpy', got %r" % _requested
    )

HAVE_NUMBA = False
if _requested == "numba":
    try:
        from numba import njit as _njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - environment without numba
        HAVE_NUMBA = False


def active_backend() -> str:
    """Name of the backend actually in use ('numba' or 'numpy')."""
    return "numba" if HAVE_NUMBA else "numpy"


def maybe_jit(func):
    """Compile ``func`` with numba when the numba backend is active.

    The function must be written in nopython-compatible style; the numpy
    fallback executes the very same source, so both paths stay in lockstep.
    """
    if HAVE_NUMBA:
        return _njit(cache=True)(func)
    return func
