"""Backend switch for the hot kernels.

Every kernel module ships a numba implementation and a pure-numpy one.  The
numba path is used when numba imports and ``CHARPOLY_DISABLE_NUMBA`` is unset
(or ``0``); otherwise the numpy path is selected at import time.
"""
import os

_flag = os.environ.get("CHARPOLY_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap

USE_NUMBA = HAVE_NUMBA


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
