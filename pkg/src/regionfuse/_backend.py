"""Kernel backend selection.

``REGION_FUSE_BACKEND`` picks the implementation of the hot loops:
``numba`` (default, falls back silently when numba is missing) or ``numpy``.
"""
import os

_requested = os.environ.get("REGION_FUSE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"REGION_FUSE_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the system TBB is too old for numba; skip it instead of warning on every parallel call
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def set_threads(n=None):
    """Cap kernel parallelism at ``n`` threads and return the effective count.

    ``None`` reads ``REGION_FUSE_THREADS``; when that is unset the numba default is kept.
    Results never depend on the thread count: parallel kernels are per-pixel, reductions
    run in a fixed sequential order.
    """
    if n is None:
        env = os.environ.get("REGION_FUSE_THREADS")
        if env is None:
            return numba.get_num_threads() if HAVE_NUMBA else 1
        n = int(env)
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    if not HAVE_NUMBA:
        return 1
    n = min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    return n
