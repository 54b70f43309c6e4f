"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of numpy. Setting
``RLCM_DISABLE_JIT=1`` in the environment (before import) runs them as plain
Python/numpy instead, which is handy for debugging and for benchmarking the
two paths against each other.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

__all__ = ["JIT_ENABLED", "jit", "backend_name"]

_flag = os.environ.get("RLCM_DISABLE_JIT", "").strip().lower()
JIT_ENABLED = numba is not None and _flag not in ("1", "true", "yes", "on")


def jit(f=None, **options):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    options.setdefault("cache", True)
    if not JIT_ENABLED:
        return (lambda g: g) if f is None else f
    if f is None:
        return lambda g: numba.njit(g, **options)
    return numba.njit(f, **options)


def backend_name():
    return "numba" if JIT_ENABLED else "numpy"
