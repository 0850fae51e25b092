"""Hot-loop kernels, dispatched to numba or numpy per ``REGION_FUSE_BACKEND``.

The public wrappers normalise dtypes and memory layout so both backends see the
same inputs: float64 C-contiguous scores, uint16 region indices, bool masks.
"""
import importlib

import numpy as np

from .._backend import BACKEND

UNASSIGNED = 65535


def get_backend(name=None):
    """Return the kernel module for ``name`` (``'numba'`` or ``'numpy'``)."""
    name = BACKEND if name is None else name
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    return importlib.import_module(f"._{name}", __name__)


_impl = get_backend()


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _idx(a):
    return np.ascontiguousarray(a, dtype=np.uint16)


def label_equal(values, valid, connectivity=8, impl=None):
    """Label 4/8-connected runs of equal ``values`` restricted to ``valid`` pixels.

    Returns ``(labels, count)``; labels are int32, 0 outside ``valid``, and
    1..count ordered by each component's first pixel in raster order.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    impl = impl or _impl
    values = np.ascontiguousarray(values, dtype=np.int64)
    valid = np.ascontiguousarray(valid, dtype=np.bool_)
    labels, count = impl.label_equal(values, valid, connectivity == 8)
    return labels, int(count)


def soft_assign(R, V, impl=None):
    return (impl or _impl).soft_assign(_f64(R), _f64(V))


def hard_assign(R, V, threshold, impl=None):
    V = _f64(V)
    order = np.argsort(V, kind="stable").astype(np.int64)
    return (impl or _impl).hard_assign(_f64(R), V, float(threshold), order)


def class_fusion(R, V, impl=None):
    return (impl or _impl).class_fusion(_f64(R), _f64(V))


def region_sums(index, D, n_regions, impl=None):
    return (impl or _impl).region_sums(_idx(index), _f64(D), int(n_regions))


def scf_apply(D, index, means, impl=None):
    return (impl or _impl).scf_apply(_f64(D), _idx(index), _f64(means))
