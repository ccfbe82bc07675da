"""Kernel compilation switch.

Hot loops are written once as plain loops over int64 numpy arrays. With numba
available they are compiled with ``njit``; setting ``CHAINCOVER_DISABLE_NUMBA=1``
(or running without numba installed) leaves them as ordinary Python functions.
"""
import os

DISABLE_ENV = "CHAINCOVER_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None


def _wanted() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


USE_NUMBA = numba is not None and _wanted()


def njit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def python_impl(fn):
    """Uncompiled body of a kernel (the kernel itself when numba is off)."""
    return getattr(fn, "py_func", fn)
