"""numba implementations of the hot loops. Same contracts as ``_numpy``."""
import numba as nb
import numpy as np

UNASSIGNED = 65535


@nb.njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@nb.njit(cache=True, nogil=True)
def _link(parent, lab, ni, nj, i, j, values, valid, prov):
    # merge pixel (i, j) currently labelled ``lab`` with neighbour (ni, nj)
    if not valid[ni, nj] or values[ni, nj] != values[i, j]:
        return lab
    other = prov[ni, nj]
    if lab == 0:
        return other
    ra = _find(parent, lab)
    rb = _find(parent, other)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb
    return lab


@nb.njit(cache=True, nogil=True)
def label_equal(values, valid, eight):
    h, w = values.shape
    prov = np.zeros((h, w), np.int32)
    parent = np.empty(h * w + 1, np.int32)
    parent[0] = 0
    nxt = 1
    for i in range(h):
        for j in range(w):
            if not valid[i, j]:
                continue
            lab = 0
            if i > 0:
                lab = _link(parent, lab, i - 1, j, i, j, values, valid, prov)
            if j > 0:
                lab = _link(parent, lab, i, j - 1, i, j, values, valid, prov)
            if eight and i > 0:
                if j > 0:
                    lab = _link(parent, lab, i - 1, j - 1, i, j, values, valid, prov)
                if j < w - 1:
                    lab = _link(parent, lab, i - 1, j + 1, i, j, values, valid, prov)
            if lab == 0:
                lab = nxt
                parent[nxt] = nxt
                nxt += 1
            prov[i, j] = lab

    remap = np.zeros(nxt, np.int32)
    count = 0
    out = np.zeros((h, w), np.int32)
    for i in range(h):
        for j in range(w):
            p = prov[i, j]
            if p == 0:
                continue
            r = _find(parent, p)
            if remap[r] == 0:
                count += 1
                remap[r] = count
            out[i, j] = remap[r]
    return out, count


@nb.njit(cache=True, parallel=True)
def soft_assign(R, V):
    n, h, w = R.shape
    index = np.empty((h, w), np.uint16)
    score = np.empty((h, w), np.float64)
    for i in nb.prange(h):
        for j in range(w):
            best = R[0, i, j] * V[0]
            bi = 0
            for k in range(1, n):
                p = R[k, i, j] * V[k]
                if p > best:
                    best = p
                    bi = k
            index[i, j] = bi
            score[i, j] = best
    return index, score


@nb.njit(cache=True, parallel=True)
def hard_assign(R, V, threshold, order):
    n, h, w = R.shape
    index = np.empty((h, w), np.uint16)
    score = np.empty((h, w), np.float64)
    for i in nb.prange(h):
        for j in range(w):
            win = -1
            for t in range(n):
                k = order[t]
                if R[k, i, j] >= threshold:
                    win = k
            if win < 0:
                index[i, j] = UNASSIGNED
                score[i, j] = 0.0
            else:
                index[i, j] = win
                score[i, j] = R[win, i, j] * V[win]
    return index, score


@nb.njit(cache=True, parallel=True)
def class_fusion(R, V):
    n, h, w = R.shape
    c = V.shape[1]
    out = np.zeros((h, w, c), np.float64)
    for i in nb.prange(h):
        for j in range(w):
            for k in range(n):
                r = R[k, i, j]
                for m in range(c):
                    out[i, j, m] += r * V[k, m]
    return out


@nb.njit(cache=True, nogil=True)
def region_sums(index, D, n_regions):
    h, w, c = D.shape
    sums = np.zeros((n_regions, c), np.float64)
    counts = np.zeros(n_regions, np.int64)
    for i in range(h):
        for j in range(w):
            k = index[i, j]
            if k == UNASSIGNED:
                continue
            counts[k] += 1
            for m in range(c):
                sums[k, m] += D[i, j, m]
    return sums, counts


@nb.njit(cache=True, parallel=True)
def scf_apply(D, index, means):
    h, w, c = D.shape
    out = np.empty((h, w, c), np.float64)
    for i in nb.prange(h):
        for j in range(w):
            k = index[i, j]
            if k == UNASSIGNED:
                for m in range(c):
                    out[i, j, m] = D[i, j, m]
            else:
                for m in range(c):
                    out[i, j, m] = means[k, m] * D[i, j, m]
    return out
