"""numba switch.

Set ``ESCAPE_ATLAS_JIT=0`` to run every kernel through its pure numpy/Python path.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

JIT_ENABLED = numba is not None and os.environ.get("ESCAPE_ATLAS_JIT", "1") not in ("0", "false", "no")


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity otherwise."""
    if not JIT_ENABLED:
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


if JIT_ENABLED:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old; the workqueue layer is always available
        numba.config.THREADING_LAYER = "workqueue"
    prange = numba.prange
else:
    prange = range


def set_threads(n):
    if JIT_ENABLED and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def resolve_threads(threads=None):
    if threads:
        return int(threads)
    env = os.environ.get("ESCAPE_ATLAS_THREADS")
    return int(env) if env else None
