"""Pick the compiled kernels when available, the pure-Python ones otherwise.

Set ``RUNPROB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _purepy

if os.environ.get("RUNPROB_PURE_PYTHON", "") not in ("", "0"):
    kernels = _purepy
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _purepy
        BACKEND = "python"


def worker_count(default=None):
    """Worker threads, from ``RUNPROB_THREADS`` or ``default`` (cpu count)."""
    env = os.environ.get("RUNPROB_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    if default is not None:
        return default
    return max(1, min(8, os.cpu_count() or 1))
