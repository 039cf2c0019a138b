"""Backend selection for the compiled kernels.

Set ``GSTATINV_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
"""
import os

_FLAG = os.environ.get("GSTATINV_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` with numba when available; return it unchanged otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func
