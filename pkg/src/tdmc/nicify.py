"""Very nice tree decompositions: leaf/introduce/forget/join/edge nodes."""

from __future__ import annotations

import heapq

from .decomp import TreeDecomposition, validate
from .graph import GraphError

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
JOIN = "join"
EDGE = "edge"


class VNNode:
    __slots__ = ("kind", "bag", "children", "vertex", "endpoints")

    def __init__(self, kind, bag, children=(), vertex=None, endpoints=None):
        self.kind = kind
        self.bag = frozenset(bag)
        self.children = list(children)
        self.vertex = vertex
        self.endpoints = endpoints

    def __repr__(self):
        arg = self.vertex if self.vertex is not None else self.endpoints
        return f"VNNode({self.kind}, bag={sorted(self.bag)}, arg={arg})"


class VeryNiceTD:
    """Rooted binary tree of labeled bags plus the tree-index map."""

    def __init__(self, root, n):
        self.root = root
        self.n = n
        self.nodes = self.postorder()
        self.k = max((len(t.bag) for t in self.nodes), default=0)
        self.tree_index = compute_tree_index(self)

    def postorder(self):
        """Iterative post-order node list (children before parents)."""
        out = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
            else:
                stack.append((node, True))
                for child in reversed(node.children):
                    stack.append((child, False))
        return out

    def width(self):
        return self.k - 1

    def label_counts(self):
        counts = {}
        for t in self.nodes:
            counts[t.kind] = counts.get(t.kind, 0) + 1
        return counts

    def edge_nodes(self):
        return [t for t in self.nodes if t.kind == EDGE]


def make_very_nice(td, g):
    """Turn a valid rooted tree decomposition into a very nice one.

    Width is preserved.  Every graph edge gets exactly one edge node, placed
    directly above the introduce node of the endpoint that enters the bag
    later (first introduce encountered with both endpoints present wins).
    """
    problems = validate(g, td)
    if problems:
        raise GraphError("invalid tree decomposition: " + "; ".join(problems))

    # Rooted child lists for the original decomposition.
    children = {i: [] for i in range(len(td.bags))}
    parent = {td.root: None}
    order = [td.root]
    stack = [td.root]
    while stack:
        x = stack.pop()
        for y in td.neighbors(x):
            if y not in parent:
                parent[y] = x
                children[x].append(y)
                order.append(y)
                stack.append(y)

    placed = set()

    def introduce_above(node, v):
        bag = node.bag | {v}
        cur = VNNode(INTRODUCE, bag, [node], vertex=v)
        for u in sorted(bag - {v}):
            e = (min(u, v), max(u, v))
            if e in g.edges and e not in placed:
                placed.add(e)
                cur = VNNode(EDGE, bag, [cur], endpoints=e)
        return cur

    def adapt(node, target):
        """Chain of forgets then introduces lifting ``node`` to bag ``target``."""
        cur = node
        for v in sorted(cur.bag - target):
            cur = VNNode(FORGET, cur.bag - {v}, [cur], vertex=v)
        for v in sorted(target - cur.bag):
            cur = introduce_above(cur, v)
        return cur

    # Build bottom-up over the original bags (reverse BFS order).
    top = {}
    for i in reversed(order):
        bag = td.bags[i]
        kids = children[i]
        if not kids:
            base = VNNode(LEAF, frozenset())
            cur = base
            for v in sorted(bag):
                cur = introduce_above(cur, v)
        else:
            adapted = [adapt(top[c], bag) for c in kids]
            cur = adapted[0]
            for other in adapted[1:]:
                cur = VNNode(JOIN, bag, [cur, other])
        top[i] = cur

    cur = top[td.root]
    for v in sorted(cur.bag):
        cur = VNNode(FORGET, cur.bag - {v}, [cur], vertex=v)

    missing = g.edges - placed
    if missing:
        raise GraphError(f"internal error: edges without edge node: {sorted(missing)}")
    return VeryNiceTD(cur, g.n)


def compute_tree_index(vntd):
    """Assign each vertex a slot in 0..k-1, distinct within every bag.

    Root-to-leaf traversal with a free-list: a slot is taken when a vertex is
    forgotten (seen from the root) and released again at its introduce node.
    Smallest free slot first, so the assignment is deterministic.
    """
    k = max((len(t.bag) for t in vntd.postorder()), default=0)
    idx = {}
    stack = [(vntd.root, list(range(k)))]
    while stack:
        node, free = stack.pop()
        if node.kind == FORGET:
            v = node.vertex
            if v in idx:
                raise GraphError(f"vertex {v} forgotten twice")
            idx[v] = heapq.heappop(free)
        elif node.kind == INTRODUCE:
            heapq.heappush(free, idx[node.vertex])
        if node.kind == JOIN:
            stack.append((node.children[0], list(free)))
            stack.append((node.children[1], list(free)))
        elif node.children:
            stack.append((node.children[0], free))
    return idx


def validate_very_nice(vntd, g):
    """Return violations of the very nice invariants against graph ``g``."""
    violations = []
    root = vntd.root
    if root.bag:
        violations.append("root bag is not empty")
    edge_count = {}
    forget_count = {}
    seen_vertices = set()
    for t in vntd.postorder():
        seen_vertices |= t.bag
        if t.kind == LEAF:
            if t.children:
                violations.append("leaf node with children")
            if t.bag:
                violations.append("leaf node with non-empty bag")
        elif t.kind == INTRODUCE:
            if len(t.children) != 1:
                violations.append("introduce node without exactly one child")
            else:
                c = t.children[0]
                if t.vertex in c.bag or t.bag != c.bag | {t.vertex}:
                    violations.append(f"introduce({t.vertex}) bag mismatch")
        elif t.kind == FORGET:
            forget_count[t.vertex] = forget_count.get(t.vertex, 0) + 1
            if len(t.children) != 1:
                violations.append("forget node without exactly one child")
            else:
                c = t.children[0]
                if t.vertex not in c.bag or t.bag != c.bag - {t.vertex}:
                    violations.append(f"forget({t.vertex}) bag mismatch")
        elif t.kind == JOIN:
            if len(t.children) != 2:
                violations.append("join node without exactly two children")
            elif any(c.bag != t.bag for c in t.children):
                violations.append("join node with unequal child bags")
        elif t.kind == EDGE:
            u, v = t.endpoints
            edge_count[t.endpoints] = edge_count.get(t.endpoints, 0) + 1
            if len(t.children) != 1 or t.children[0].bag != t.bag:
                violations.append(f"edge({u},{v}) node must copy its child's bag")
            if not ({u, v} <= t.bag):
                violations.append(f"edge({u},{v}) endpoints not in bag")
        else:
            violations.append(f"unknown node kind {t.kind!r}")
    for e in sorted(g.edges):
        c = edge_count.get(e, 0)
        if c != 1:
            violations.append(f"edge {e} has {c} edge nodes (want 1)")
    for e in edge_count:
        if e not in g.edges:
            violations.append(f"edge node for non-edge {e}")
    for v in range(g.n):
        if v not in seen_vertices:
            violations.append(f"vertex {v} occurs in no bag")
        elif forget_count.get(v, 0) != 1:
            violations.append(f"vertex {v} forgotten {forget_count.get(v, 0)} times")
    idx = vntd.tree_index
    for t in vntd.postorder():
        slots = {idx.get(v) for v in t.bag}
        if None in slots or len(slots) != len(t.bag):
            violations.append(f"tree-index not injective on bag {sorted(t.bag)}")
        elif any(s >= vntd.k for s in slots):
            violations.append(f"tree-index exceeds k-1 on bag {sorted(t.bag)}")
    return violations


def write_vntd(vntd):
    """Serialize as an annotated ``.td``: bags plus ``c label`` comment lines.

    Node ids are assigned in preorder with the root as node 1; tree lines are
    ``<parent> <child>`` pairs in child order.
    """
    ids = {}
    preorder = []
    stack = [vntd.root]
    while stack:
        t = stack.pop()
        ids[id(t)] = len(preorder) + 1
        preorder.append(t)
        for c in reversed(t.children):
            stack.append(c)
    lines = [f"s vntd {len(preorder)} {vntd.k} {vntd.n}"]
    for t in preorder:
        i = ids[id(t)]
        lines.append("b " + " ".join([str(i)] + [str(v + 1) for v in sorted(t.bag)]))
        if t.kind == INTRODUCE or t.kind == FORGET:
            lines.append(f"c label {i} {t.kind} {t.vertex + 1}")
        elif t.kind == EDGE:
            u, v = t.endpoints
            lines.append(f"c label {i} edge {u + 1} {v + 1}")
        else:
            lines.append(f"c label {i} {t.kind}")
    for t in preorder:
        for c in t.children:
            lines.append(f"{ids[id(t)]} {ids[id(c)]}")
    return "\n".join(lines) + "\n"


def parse_vntd(text):
    """Parse the annotated format produced by :func:`write_vntd`."""
    header = None
    bags = {}
    labels = {}
    child_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "s":
            if len(parts) != 5 or parts[1] != "vntd":
                raise GraphError(f"line {lineno}: malformed header")
            header = (int(parts[2]), int(parts[3]), int(parts[4]))
        elif parts[0] == "b":
            bags[int(parts[1])] = frozenset(int(t) - 1 for t in parts[2:])
        elif parts[0] == "c":
            if len(parts) < 4 or parts[1] != "label":
                continue
            labels[int(parts[2])] = parts[3:]
        else:
            child_lines.append((int(parts[0]), int(parts[1])))
    if header is None:
        raise GraphError("missing 's vntd' header")
    count, _, n = header
    children = {i: [] for i in range(1, count + 1)}
    has_parent = set()
    for p, c in child_lines:
        children[p].append(c)
        has_parent.add(c)
    roots = [i for i in range(1, count + 1) if i not in has_parent]
    if len(roots) != 1:
        raise GraphError("annotated decomposition must have exactly one root")

    def build(i):
        lab = labels.get(i)
        if lab is None:
            raise GraphError(f"node {i} has no label line")
        kind = lab[0]
        kids = [build(c) for c in children[i]]
        if kind in (INTRODUCE, FORGET):
            return VNNode(kind, bags[i], kids, vertex=int(lab[1]) - 1)
        if kind == EDGE:
            u, v = int(lab[1]) - 1, int(lab[2]) - 1
            return VNNode(EDGE, bags[i], kids, endpoints=(min(u, v), max(u, v)))
        return VNNode(kind, bags[i], kids)

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, count + 100))
    try:
        root = build(roots[0])
    finally:
        sys.setrecursionlimit(old)
    return VeryNiceTD(root, n)
