"""Optional numba acceleration.

Hot kernels are written twice: an ``@njit`` version and a pure-numpy
fallback.  The numba path is used when numba imports cleanly and the
``GNGSTREAM_DISABLE_NUMBA`` environment variable is unset (or "0").
"""
import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


def _flag_set(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _flag_set("GNGSTREAM_DISABLE_NUMBA")


def backend():
    """Name of the kernel backend selected at import time."""
    return "numba" if USE_NUMBA else "numpy"
