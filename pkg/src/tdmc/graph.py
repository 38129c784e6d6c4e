"""Undirected graphs, PACE-style ``.gr`` I/O, and vertex weight maps."""

from __future__ import annotations


class GraphError(ValueError):
    """Raised for malformed graph or weight documents."""


class Graph:
    """Simple undirected graph with dense 0-based vertex ids.

    Edges are stored as ordered pairs ``(u, v)`` with ``u < v``; adjacency
    lists are kept sorted and consistent with the edge set.  Instances are
    treated as immutable after construction.
    """

    def __init__(self, n, edges=(), labels=None):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = n
        self.labels = list(labels) if labels is not None else [str(i + 1) for i in range(n)]
        if len(self.labels) != n:
            raise GraphError("need exactly one label per vertex")
        self.duplicate_edges = 0
        edge_set = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in edge_set:
                self.duplicate_edges += 1
            else:
                edge_set.add(e)
        self.edges = edge_set
        adj = [[] for _ in range(n)]
        for u, v in edge_set:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = [sorted(a) for a in adj]

    @property
    def m(self):
        return len(self.edges)

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edges

    def degree(self, v):
        return len(self.adj[v])

    def isolated_vertices(self):
        return [v for v in range(self.n) if not self.adj[v]]

    def __eq__(self, other):
        if isinstance(other, Graph):
            return self.n == other.n and self.edges == other.edges
        return NotImplemented

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def parse_graph(text):
    """Parse a PACE ``.gr`` document into a :class:`Graph`.

    Accepts ``c`` comment lines, a single ``p tw <n> <m>`` header, and
    1-based edge lines.  Duplicate edges are collapsed (the count is kept in
    ``Graph.duplicate_edges``); self-loops and out-of-range ids are errors.
    """
    n = None
    declared_m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "tw":
                raise GraphError(f"line {lineno}: malformed header {line!r}")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer token in header") from None
            continue
        if n is None:
            raise GraphError(f"line {lineno}: edge line before header")
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected two endpoints, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer token {line!r}") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"line {lineno}: vertex id out of range [1,{n}]")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u - 1, v - 1))
    if n is None:
        raise GraphError("missing 'p tw' header")
    return Graph(n, edges)


def write_graph(g):
    """Serialize a graph in PACE ``.gr`` form (1-based ids, sorted edges)."""
    lines = [f"p tw {g.n} {g.m}"]
    for u, v in sorted(g.edges):
        lines.append(f"{u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


class WeightMap:
    """Integer vertex weights per free-variable name.

    Unlisted vertices take the variable's default weight (1 unless a
    ``default`` line says otherwise).  Negative weights are allowed; they are
    how maximization is expressed.
    """

    def __init__(self, weights=None, defaults=None):
        self.weights = {var: dict(m) for var, m in (weights or {}).items()}
        self.defaults = dict(defaults or {})

    def weight(self, var, v):
        return self.weights.get(var, {}).get(v, self.defaults.get(var, 1))

    def scaled(self, factor):
        return WeightMap(
            {var: {v: w * factor for v, w in m.items()} for var, m in self.weights.items()},
            {var: d * factor for var, d in self.defaults.items()},
        )

    def check(self, n):
        for var, m in self.weights.items():
            for v in m:
                if not (0 <= v < n):
                    raise GraphError(f"weight for {var} references vertex {v + 1} >= n")


def parse_weights(text):
    """Parse a weight document.

    Line format: ``<var> <vertex> <weight>`` with 1-based vertex ids, or
    ``default <var> <weight>``.  Comment lines start with ``c``.
    """
    weights = {}
    defaults = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c "):
            continue
        parts = line.split()
        if parts[0] == "default":
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: expected 'default <var> <weight>'")
            try:
                defaults[parts[1]] = int(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer weight {parts[2]!r}") from None
        else:
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: expected '<var> <vertex> <weight>'")
            try:
                vertex, w = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer token in {line!r}") from None
            if vertex < 1:
                raise GraphError(f"line {lineno}: vertex ids are 1-based")
            weights.setdefault(parts[0], {})[vertex - 1] = w
    return WeightMap(weights, defaults)
