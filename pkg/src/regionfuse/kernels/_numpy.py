"""Pure-numpy implementations of the hot loops.

Every function matches its ``_numba`` twin: identical outputs for the integer
kernels, bit-identical floats for everything except ``class_fusion`` (einsum
may reorder the sum over regions).
"""
import numpy as np

UNASSIGNED = 65535

_OFFSETS_4 = ((1, 0), (0, 1))
_OFFSETS_8 = ((1, 0), (0, 1), (1, 1), (1, -1))


def _pairs(shape, di, dj):
    # slices (a, b) such that b is the (di, dj) neighbour of a
    h, w = shape
    rows_a, rows_b = slice(0, h - di), slice(di, h)
    if dj >= 0:
        cols_a, cols_b = slice(0, w - dj), slice(dj, w)
    else:
        cols_a, cols_b = slice(-dj, w), slice(0, w + dj)
    return (rows_a, cols_a), (rows_b, cols_b)


def label_equal(values, valid, eight):
    h, w = values.shape
    big = np.int64(h * w + 1)
    flat_ids = np.arange(1, h * w + 1, dtype=np.int64).reshape(h, w)
    lab = np.where(valid, flat_ids, big)
    links = []
    for di, dj in (_OFFSETS_8 if eight else _OFFSETS_4):
        a, b = _pairs((h, w), di, dj)
        same = valid[a] & valid[b] & (values[a] == values[b])
        links.append((a, b, same))

    # min-label propagation with pointer jumping; every label is the flat id of a
    # pixel in the same component, so it converges to the component's first raster pixel
    while True:
        new = lab.copy()
        for a, b, same in links:
            np.minimum(new[a], np.where(same, lab[b], big), out=new[a])
            np.minimum(new[b], np.where(same, lab[a], big), out=new[b])
        flat = new.ravel()
        on = valid.ravel()
        flat[on] = np.minimum(flat[on], flat[flat[on] - 1])
        if np.array_equal(new, lab):
            break
        lab = new

    out = np.zeros((h, w), np.int32)
    if not valid.any():
        return out, 0
    roots, inverse = np.unique(lab[valid], return_inverse=True)
    out[valid] = inverse.astype(np.int32) + 1
    return out, int(roots.size)


def soft_assign(R, V):
    prod = R * V[:, None, None]
    index = prod.argmax(axis=0)
    score = np.take_along_axis(prod, index[None], axis=0)[0]
    return index.astype(np.uint16), score


def hard_assign(R, V, threshold, order):
    n, h, w = R.shape
    index = np.full((h, w), UNASSIGNED, np.uint16)
    for k in order:
        index[R[k] >= threshold] = k
    score = np.zeros((h, w), np.float64)
    hit = index != UNASSIGNED
    rows, cols = np.nonzero(hit)
    k = index[rows, cols].astype(np.intp)
    score[rows, cols] = R[k, rows, cols] * V[k]
    return index, score


def class_fusion(R, V):
    return np.einsum("nhw,nc->hwc", R, V)


def region_sums(index, D, n_regions):
    c = D.shape[2]
    hit = index != UNASSIGNED
    idx = index[hit].astype(np.intp)
    counts = np.bincount(idx, minlength=n_regions).astype(np.int64)
    sums = np.zeros((n_regions, c), np.float64)
    for m in range(c):
        sums[:, m] = np.bincount(idx, weights=D[..., m][hit], minlength=n_regions)
    return sums, counts


def scf_apply(D, index, means):
    hit = index != UNASSIGNED
    out = D.copy()
    out[hit] = means[index[hit].astype(np.intp)] * D[hit]
    return out
