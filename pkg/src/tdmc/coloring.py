"""Reference state-vector contract: 3-coloring.

A state packs one color per tree-index slot (two bits each, 0 meaning "not
in the bag").  The vector is a duplicate-free set of such packed states,
kept as a sorted uint64 array so the kernels can stay branch-light.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .decomp import heuristic_decompose
from .engine import simulate
from .nicify import make_very_nice


class ColoringVector:
    """Set of packed coloring states; hooks match the engine contract."""

    def __init__(self, states=None, backend=None):
        self.backend = backend if backend is not None else kernels.get_backend()
        if states is None:
            states = np.zeros(1, dtype=np.uint64)
        self.states = states

    def introduce(self, bag, v, idx):
        return ColoringVector(self.backend.introduce(self.states, 2 * idx[v]), self.backend)

    def forget(self, bag, v, idx):
        return ColoringVector(self.backend.forget(self.states, 2 * idx[v]), self.backend)

    def edge(self, bag, u, v, idx):
        return ColoringVector(self.backend.edge_filter(self.states, 2 * idx[u], 2 * idx[v]), self.backend)

    def join(self, bag, other, idx):
        # Fully symmetric automaton: the join is a set intersection.
        return ColoringVector(self.backend.intersect(self.states, other.states), self.backend)

    def color_of(self, state, slot):
        return (int(state) >> (2 * slot)) & 3

    def __len__(self):
        return int(self.states.shape[0])

    def __contains__(self, packed):
        i = int(np.searchsorted(self.states, np.uint64(packed)))
        return i < len(self) and int(self.states[i]) == packed

    def as_set(self):
        return {int(s) for s in self.states}


def coloring_factory(backend=None):
    be = backend if backend is not None else kernels.get_backend()
    return lambda: ColoringVector(backend=be)


def solve_3coloring(g, vntd=None, backend=None, deadline=None):
    """Decide 3-colorability of ``g`` via the coloring tree automaton."""
    if vntd is None:
        vntd = make_very_nice(heuristic_decompose(g), g)
    if vntd.k > 32:
        raise ValueError("bag size exceeds the 32-slot packing limit")
    result = simulate(vntd, coloring_factory(backend), deadline=deadline)
    return {
        "satisfiable": len(result.root_vector) > 0,
        "stats": result.stats_dict(),
    }
