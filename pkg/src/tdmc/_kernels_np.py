"""Pure-numpy kernels for packed 3-coloring state sets.

State sets are sorted, duplicate-free uint64 arrays; each bag slot occupies
two bits (0 = vertex not in bag, 1..3 = color).
"""

import numpy as np

NAME = "numpy"


def introduce(states, shift):
    out = np.concatenate([
        states | np.uint64(1 << shift),
        states | np.uint64(2 << shift),
        states | np.uint64(3 << shift),
    ])
    out.sort()
    return out


def forget(states, shift):
    cleared = states & np.uint64(~(3 << shift) & 0xFFFFFFFFFFFFFFFF)
    return np.unique(cleared)


def edge_filter(states, shift_u, shift_v):
    cu = (states >> np.uint64(shift_u)) & np.uint64(3)
    cv = (states >> np.uint64(shift_v)) & np.uint64(3)
    return states[cu != cv]


def intersect(a, b):
    return np.intersect1d(a, b, assume_unique=True)
