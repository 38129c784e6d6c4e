from conftest import complete_graph, cycle_graph, grid_graph, random_graph
from tdmc.decomp import heuristic_decompose
from tdmc.graph import Graph
from tdmc.nicify import (
    EDGE,
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    make_very_nice,
    parse_vntd,
    validate_very_nice,
    write_vntd,
)


def build(g):
    return make_very_nice(heuristic_decompose(g), g)


def test_structure_on_cycle():
    g = cycle_graph(5)
    vntd = build(g)
    assert validate_very_nice(vntd, g) == []
    kinds = {}
    for node in vntd.nodes:
        kinds[node.kind] = kinds.get(node.kind, 0) + 1
    assert kinds[EDGE] == g.m
    assert kinds[FORGET] == g.n  # every vertex forgotten exactly once
    assert list(vntd.root.bag) == []


def test_width_preserved():
    for g in (cycle_graph(7), complete_graph(5), grid_graph(3, 4)):
        td = heuristic_decompose(g)
        vntd = make_very_nice(td, g)
        assert vntd.width() == td.width()


def test_tree_index_injective_per_bag():
    g = grid_graph(3, 4)
    vntd = build(g)
    idx = vntd.tree_index
    for node in vntd.nodes:
        slots = [idx[v] for v in node.bag]
        assert len(set(slots)) == len(slots)
        assert all(0 <= s < vntd.k for s in slots)


def test_forget_each_vertex_once():
    g = grid_graph(2, 5)
    vntd = build(g)
    forgotten = [n.vertex for n in vntd.nodes if n.kind == FORGET]
    assert sorted(forgotten) == list(range(g.n))


def test_random_graphs_validate(rng):
    for _ in range(60):
        n = rng.randint(1, 13)
        g = random_graph(rng, n, rng.choice([0.15, 0.4, 0.7]))
        vntd = build(g)
        assert validate_very_nice(vntd, g) == []


def test_join_children_share_bag():
    g = Graph(6, [(0, 1), (2, 3), (4, 5)])  # forces joins via stitching
    vntd = build(g)
    joins = [n for n in vntd.nodes if n.kind == JOIN]
    for j in joins:
        for child in j.children:
            assert sorted(child.bag) == sorted(j.bag)


def test_serialization_roundtrip():
    g = grid_graph(2, 4)
    vntd = build(g)
    vntd2 = parse_vntd(write_vntd(vntd))
    assert validate_very_nice(vntd2, g) == []
    assert len(vntd2.nodes) == len(vntd.nodes)
    assert vntd2.k == vntd.k
    assert [n.kind for n in vntd2.nodes] == [n.kind for n in vntd.nodes]


def test_empty_graph():
    g = Graph(0, [])
    vntd = build(g)
    assert validate_very_nice(vntd, g) == []
    assert vntd.root.kind == LEAF or vntd.root.bag == []
