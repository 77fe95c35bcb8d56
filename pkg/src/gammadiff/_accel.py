"""Numba toggle.

Kernels are compiled with ``numba.njit`` when numba is importable and the
environment variable ``GAMMADIFF_DISABLE_NUMBA`` is unset (or ``0``).
Otherwise the pure-numpy fallbacks in :mod:`gammadiff._kernels` are used.
"""
import os

_flag = os.environ.get("GAMMADIFF_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no") or "NUMBA_DISABLE_JIT" in os.environ

try:
    if _disabled:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    opts = {"cache": True, "nogil": True}
    opts.update(kwargs)

    def wrap(f):
        if HAVE_NUMBA:
            return numba.njit(**opts)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
