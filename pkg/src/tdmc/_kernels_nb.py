"""Numba-compiled kernels; same contract as :mod:`tdmc._kernels_np`."""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def introduce(states, shift):
    n = states.shape[0]
    out = np.empty(3 * n, dtype=np.uint64)
    for c in range(3):
        mask = np.uint64(c + 1) << np.uint64(shift)
        base = c * n
        for i in range(n):
            out[base + i] = states[i] | mask
    out.sort()
    return out


@njit(cache=True)
def forget(states, shift):
    n = states.shape[0]
    mask = ~(np.uint64(3) << np.uint64(shift))
    cleared = np.empty(n, dtype=np.uint64)
    for i in range(n):
        cleared[i] = states[i] & mask
    cleared.sort()
    out = np.empty(n, dtype=np.uint64)
    m = 0
    for i in range(n):
        if m == 0 or cleared[i] != out[m - 1]:
            out[m] = cleared[i]
            m += 1
    return out[:m]


@njit(cache=True)
def edge_filter(states, shift_u, shift_v):
    n = states.shape[0]
    su = np.uint64(shift_u)
    sv = np.uint64(shift_v)
    three = np.uint64(3)
    out = np.empty(n, dtype=np.uint64)
    m = 0
    for i in range(n):
        s = states[i]
        if (s >> su) & three != (s >> sv) & three:
            out[m] = s
            m += 1
    return out[:m]


@njit(cache=True)
def intersect(a, b):
    # Two-pointer merge; both inputs sorted and duplicate-free.
    out = np.empty(min(a.shape[0], b.shape[0]), dtype=np.uint64)
    i = 0
    j = 0
    m = 0
    while i < a.shape[0] and j < b.shape[0]:
        if a[i] < b[j]:
            i += 1
        elif a[i] > b[j]:
            j += 1
        else:
            out[m] = a[i]
            m += 1
            i += 1
            j += 1
    return out[:m]
