"""Optional numba acceleration.

Kernels are compiled with numba when it is importable and the environment
variable ``MEMCONSENSUS_DISABLE_NUMBA`` is unset (or ``0``). Otherwise every
kernel falls back to its pure-numpy twin in :mod:`memconsensus.kernels`.
The flag is read once at import; ``USE_NUMBA`` can be patched at runtime
(the dispatchers look it up on every call).
"""
import os

ENV_FLAG = "MEMCONSENSUS_DISABLE_NUMBA"

try:
    import numba
    HAVE_NUMBA = True
    # TBB is probed last: old system TBB builds only trigger a warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get(ENV_FLAG, "0").strip().lower() in ("", "0", "false", "no")


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrap(fn):
        return fn
    if args and callable(args[0]):
        return args[0]
    return wrap


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range


def backend():
    return "numba" if (USE_NUMBA and HAVE_NUMBA) else "numpy"


def set_threads(n):
    """Cap numba worker threads. Results do not depend on the count."""
    if HAVE_NUMBA and n is not None:
        n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)
