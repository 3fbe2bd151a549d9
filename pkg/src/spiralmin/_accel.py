"""Optional numba acceleration.

Hot kernels are written once as plain Python loops and compiled with
``numba.njit`` when available. Setting ``SPIRALMIN_NO_NUMBA=1`` in the
environment (before import) forces the pure-numpy fallback paths.
"""

import os

NUMBA_REQUESTED = os.environ.get("SPIRALMIN_NO_NUMBA", "").strip().lower() not in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = NUMBA_REQUESTED and numba is not None


def jit(func):
    """Compile ``func`` in nopython mode, or return it unchanged.

    With the fallback selected nothing is compiled, so every loop kernel
    runs as plain Python and dispatchers route to the vectorized numpy
    versions instead. ``.py_func`` is available in both cases.
    """
    if not NUMBA_ENABLED:
        func.py_func = func
        return func
    return numba.njit(cache=True)(func)


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"
