"""
Torus kernels
-------------

Wraparound scans over flattened torus configurations, jitted with numba. Cells
are stored in C order over the dims, so the flat index of (x_1, ..., x_d) is
sum x_i * stride_i.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def strides_of(dims):
    d = dims.shape[0]
    strides = np.empty(d, dtype=np.int64)
    acc = 1
    for i in range(d - 1, -1, -1):
        strides[i] = acc
        acc *= dims[i]
    return strides


@njit(cache=True)
def shifted_index(flat, shift, dims, strides):
    """Flat index of (coords(flat) + shift) mod dims."""
    out = 0
    rem = flat
    for i in range(dims.shape[0]):
        c = rem // strides[i]
        rem -= c * strides[i]
        out += ((c + shift[i]) % dims[i]) * strides[i]
    return out


@njit(cache=True)
def anchor_keys(cells, dims, offsets, projection, base):
    """
    Mixed-radix key of the local symbols under `offsets` anchored at every cell.

    `projection` maps global symbols to local ones; the key of a tuple
    (w_0, ..., w_{k-1}) is sum w_j * base**(k-1-j).
    """
    n = cells.shape[0]
    k = offsets.shape[0]
    strides = strides_of(dims)
    keys = np.empty(n, dtype=np.int64)
    for a in range(n):
        key = 0
        for j in range(k):
            idx = shifted_index(a, offsets[j], dims, strides)
            key = key * base + projection[cells[idx]]
        keys[a] = key
    return keys


@njit(cache=True)
def fixing_translations(cells, dims):
    """Boolean mask over flat shifts t with cells(z + t) == cells(z) for all z."""
    n = cells.shape[0]
    d = dims.shape[0]
    strides = strides_of(dims)
    fixed = np.zeros(n, dtype=np.bool_)
    shift = np.empty(d, dtype=np.int64)
    for t in range(n):
        rem = t
        for i in range(d):
            shift[i] = rem // strides[i]
            rem -= shift[i] * strides[i]
        ok = True
        for z in range(n):
            if cells[shifted_index(z, shift, dims, strides)] != cells[z]:
                ok = False
                break
        fixed[t] = ok
    return fixed


@njit(cache=True)
def is_lex_min(cells, dims):
    """True when no translate of the torus is lexicographically smaller."""
    n = cells.shape[0]
    d = dims.shape[0]
    strides = strides_of(dims)
    shift = np.empty(d, dtype=np.int64)
    for t in range(1, n):
        rem = t
        for i in range(d):
            shift[i] = rem // strides[i]
            rem -= shift[i] * strides[i]
        for z in range(n):
            v = cells[shifted_index(z, shift, dims, strides)]
            if v < cells[z]:
                return False
            if v > cells[z]:
                break
    return True
