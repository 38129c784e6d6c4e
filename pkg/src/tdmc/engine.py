"""Deterministic simulation of nondeterministic bottom-up tree automata.

A state-vector contract supplies a leaf factory and the four behaviour hooks
(introduce, forget, join, edge); the engine only orchestrates the post-order
traversal over a very nice tree decomposition and collects statistics.
"""

from __future__ import annotations

import time

from .nicify import EDGE, FORGET, INTRODUCE, JOIN, LEAF


class SimulationTimeout(Exception):
    """Raised when a deadline expires between tree nodes."""

    def __init__(self, partial_stats):
        super().__init__("simulation deadline exceeded")
        self.partial_stats = partial_stats


class SimulationError(Exception):
    """A contract hook failed; carries the node context."""


class NodeStat:
    __slots__ = ("index", "kind", "states", "seconds")

    def __init__(self, index, kind, states, seconds):
        self.index = index
        self.kind = kind
        self.states = states
        self.seconds = seconds


class SimulationResult:
    def __init__(self, root_vector, node_stats, counters):
        self.root_vector = root_vector
        self.node_stats = node_stats
        self.counters = counters

    @property
    def max_states(self):
        return max((s.states for s in self.node_stats), default=0)

    def stats_dict(self):
        kinds = {}
        for s in self.node_stats:
            kinds[s.kind] = kinds.get(s.kind, 0) + 1
        return {
            "nodes": len(self.node_stats),
            "max_states": self.max_states,
            "node_kinds": kinds,
            "counters": dict(self.counters),
        }


def simulate(vntd, factory, deadline=None):
    """Run the automaton described by ``factory`` over ``vntd``.

    ``factory()`` yields the state vector of a leaf; every other node is
    handled by the hooks on the child vector(s).  Returns the root vector
    plus per-node statistics.  ``deadline`` (a ``time.monotonic`` value) is
    checked between nodes.
    """
    idx = vntd.tree_index
    results = {}
    node_stats = []
    counters = {}
    for i, node in enumerate(vntd.nodes):
        if deadline is not None and time.monotonic() > deadline:
            raise SimulationTimeout(node_stats)
        t0 = time.perf_counter()
        try:
            if node.kind == LEAF:
                vec = factory()
            elif node.kind == INTRODUCE:
                vec = results.pop(id(node.children[0])).introduce(node.bag, node.vertex, idx)
            elif node.kind == FORGET:
                vec = results.pop(id(node.children[0])).forget(node.bag, node.vertex, idx)
            elif node.kind == EDGE:
                u, v = node.endpoints
                vec = results.pop(id(node.children[0])).edge(node.bag, u, v, idx)
            elif node.kind == JOIN:
                left = results.pop(id(node.children[0]))
                right = results.pop(id(node.children[1]))
                vec = left.join(node.bag, right, idx)
            else:
                raise SimulationError(f"unknown node kind {node.kind!r}")
        except (SimulationTimeout, SimulationError):
            raise
        except Exception as exc:
            raise SimulationError(f"hook failed at node {i} ({node.kind}): {exc}") from exc
        results[id(node)] = vec
        probe = getattr(vec, "counters", None)
        if probe is not None:
            counters = probe
        node_stats.append(NodeStat(i, node.kind, len(vec), time.perf_counter() - t0))
    root_vec = results[id(vntd.root)]
    return SimulationResult(root_vec, node_stats, counters)


def join_bucketed(qy, qz, sym_key, combine, counters=None):
    """Bucketed join of two state sets.

    States are grouped by their symmetric key; ``combine`` is only called on
    pairs with equal keys and may return ``None`` to reject.  ``counters``
    (a dict) accumulates ``probes`` (hash inserts/lookups plus combine
    calls) and ``pairs`` (candidate pairs seen).
    """
    if counters is None:
        counters = {}
    probes = 0
    pairs = 0
    buckets = {}
    for a in qy:
        probes += 1
        buckets.setdefault(sym_key(a), []).append(a)
    out = []
    for b in qz:
        probes += 1
        bucket = buckets.get(sym_key(b))
        if not bucket:
            continue
        for a in bucket:
            pairs += 1
            probes += 1
            c = combine(a, b)
            if c is not None:
                out.append(c)
    counters["probes"] = counters.get("probes", 0) + probes
    counters["pairs"] = counters.get("pairs", 0) + pairs
    counters["joins"] = counters.get("joins", 0) + 1
    counters["join_inputs"] = counters.get("join_inputs", 0) + len(qy) + len(qz)
    return out


def join_naive(qy, qz, sym_key, combine, counters=None):
    """Quadratic all-pairs reference join (differential baseline)."""
    if counters is None:
        counters = {}
    out = []
    for a in qy:
        ka = sym_key(a)
        for b in qz:
            counters["pairs"] = counters.get("pairs", 0) + 1
            if ka != sym_key(b):
                continue
            c = combine(a, b)
            if c is not None:
                out.append(c)
    counters["joins"] = counters.get("joins", 0) + 1
    return out
