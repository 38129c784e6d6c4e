"""Tree decompositions: PACE ``.td`` I/O, validation, and heuristics."""

from __future__ import annotations

from .graph import GraphError


class TreeDecomposition:
    """A tree of bags over a graph's vertices.

    ``bags`` is a list of vertex-id sets, ``tree`` a set of undirected edges
    between bag indices, ``root`` the bag index used when a rooted view is
    needed (defaults to 0).
    """

    def __init__(self, bags, tree, root=0, n=None):
        self.bags = [frozenset(b) for b in bags]
        self.tree = {(min(a, b), max(a, b)) for a, b in tree}
        self.root = root
        self.n = n if n is not None else (max((max(b, default=-1) for b in self.bags), default=-1) + 1)

    def width(self):
        """Maximum bag size minus one."""
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self, i):
        out = []
        for a, b in self.tree:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def is_tree(self):
        k = len(self.bags)
        if k == 0:
            return False
        if len(self.tree) != k - 1:
            return False
        seen = {0}
        stack = [0]
        adj = {i: [] for i in range(k)}
        for a, b in self.tree:
            adj[a].append(b)
            adj[b].append(a)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == k

    def __eq__(self, other):
        if isinstance(other, TreeDecomposition):
            return self.bags == other.bags and self.tree == other.tree
        return NotImplemented


def width(td):
    return td.width()


def parse_td(text):
    """Parse a PACE ``.td`` document (1-based bag and vertex ids)."""
    header = None
    bags = {}
    tree = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise GraphError(f"line {lineno}: duplicate 's td' header")
            if len(parts) != 5 or parts[1] != "td":
                raise GraphError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]), int(parts[4]))
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer token in header") from None
        elif parts[0] == "b":
            if header is None:
                raise GraphError(f"line {lineno}: bag line before header")
            try:
                idx = int(parts[1])
                verts = [int(t) for t in parts[2:]]
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer token in bag line") from None
            if not (1 <= idx <= header[0]):
                raise GraphError(f"line {lineno}: bag index {idx} out of range")
            if idx in bags:
                raise GraphError(f"line {lineno}: duplicate bag {idx}")
            for v in verts:
                if not (1 <= v <= header[2]):
                    raise GraphError(f"line {lineno}: vertex id {v} out of range")
            bags[idx] = frozenset(v - 1 for v in verts)
        else:
            if header is None:
                raise GraphError(f"line {lineno}: edge line before header")
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected two bag indices")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer token in {line!r}") from None
            if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                raise GraphError(f"line {lineno}: bag index out of range")
            tree.append((a - 1, b - 1))
    if header is None:
        raise GraphError("missing 's td' header")
    nbags, _, n = header
    bag_list = [bags.get(i + 1, frozenset()) for i in range(nbags)]
    td = TreeDecomposition(bag_list, tree, n=n)
    if not td.is_tree():
        raise GraphError("bag edges do not form a tree")
    return td


def write_td(td):
    """Serialize in PACE ``.td`` form; bags listed with ascending vertex ids."""
    lines = [f"s td {len(td.bags)} {td.width() + 1} {td.n}"]
    for i, bag in enumerate(td.bags):
        lines.append("b " + " ".join([str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    for a, b in sorted(td.tree):
        lines.append(f"{a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


def validate(g, td):
    """Return a list of violation strings; empty means the decomposition is valid."""
    violations = []
    if not td.is_tree():
        violations.append("tree: bag edges do not form a connected acyclic tree")
        return violations
    for bag in td.bags:
        for v in bag:
            if not (0 <= v < g.n):
                violations.append(f"bag vertex {v} outside 0..{g.n - 1}")
                return violations
    covered = set()
    for bag in td.bags:
        covered |= bag
    for v in range(g.n):
        if v not in covered:
            violations.append(f"T1: vertex {v} occurs in no bag")
    for u, v in sorted(g.edges):
        if not any(u in bag and v in bag for bag in td.bags):
            violations.append(f"T2: edge ({u},{v}) is contained in no bag")
    # T3: the bags holding each vertex must induce a connected subtree.
    adj = {i: [] for i in range(len(td.bags))}
    for a, b in td.tree:
        adj[a].append(b)
        adj[b].append(a)
    for v in range(g.n):
        holding = [i for i, bag in enumerate(td.bags) if v in bag]
        if not holding:
            continue
        seen = {holding[0]}
        stack = [holding[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen and v in td.bags[y]:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(holding):
            violations.append(f"T3: bags containing vertex {v} are disconnected")
    return violations


def _eliminate(adjacency, order_key):
    """Run an elimination ordering; yield (vertex, closed residual neighborhood)."""
    adj = {v: set(nb) for v, nb in adjacency.items()}
    while adj:
        v = min(adj, key=lambda u: (order_key(u, adj), u))
        nbrs = adj[v]
        yield v, {v} | nbrs
        for a in nbrs:
            adj[a].discard(v)
        nbrs_list = sorted(nbrs)
        for i, a in enumerate(nbrs_list):
            for b in nbrs_list[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
        del adj[v]


def _min_degree_key(u, adj):
    return len(adj[u])


def _min_fill_key(u, adj):
    nbrs = sorted(adj[u])
    fill = 0
    for i, a in enumerate(nbrs):
        for b in nbrs[i + 1:]:
            if b not in adj[a]:
                fill += 1
    return fill


STRATEGIES = {"min-degree": _min_degree_key, "min-fill": _min_fill_key}


def heuristic_decompose(g, strategy="min-fill"):
    """Build a tree decomposition from an elimination ordering.

    Each eliminated vertex contributes its closed residual neighborhood as a
    bag; the bag is attached to the bag of the earliest later-eliminated
    neighbor.  Components without such a neighbor become roots and are
    stitched to bag 0, so the result is always a single tree.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if g.n == 0:
        return TreeDecomposition([frozenset()], [], n=0)
    key = STRATEGIES[strategy]
    adjacency = {v: set(g.adj[v]) for v in range(g.n)}
    order = []
    bags = []
    bag_of = {}
    for v, bag in _eliminate(adjacency, key):
        bag_of[v] = len(bags)
        order.append(v)
        bags.append(bag)
    position = {v: i for i, v in enumerate(order)}
    tree = []
    roots = []
    for i, v in enumerate(order):
        later = [u for u in bags[i] if u != v and position[u] > i]
        if later:
            parent = min(later, key=lambda u: position[u])
            tree.append((i, bag_of[parent]))
        else:
            roots.append(i)
    # One root per connected component; stitch the extra ones to bag 0.
    comp = list(range(len(bags)))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for a, b in tree:
        comp[find(a)] = find(b)
    for r in roots:
        if find(r) != find(0):
            tree.append((0, r))
            comp[find(r)] = find(0)
    return TreeDecomposition(bags, tree, n=g.n)
