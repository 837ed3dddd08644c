"""Optional numba acceleration.

The hot integration loops are written in a numba-compatible subset of
numpy. When numba is installed and NMQ_DISABLE_NUMBA is unset, they are
JIT-compiled; otherwise the same functions run as plain Python/numpy.
`benchmarks/bench_jit.py` compares the two paths.
"""
from __future__ import annotations

import os


def _numba_disabled() -> bool:
    return os.environ.get("NMQ_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false")


HAVE_NUMBA = False
if not _numba_disabled():
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False


if HAVE_NUMBA:
    from numba import njit as _numba_njit

    def njit(func=None, **kwargs):
        kwargs.setdefault("cache", True)
        if func is None:
            return _numba_njit(**kwargs)
        return _numba_njit(**kwargs)(func)

else:

    def njit(func=None, **kwargs):  # noqa: ARG001 - mirror numba's signature
        if func is None:
            return lambda f: f
        return func
