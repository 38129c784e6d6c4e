import pytest

from tdmc.graph import Graph, GraphError, WeightMap, parse_graph, parse_weights, write_graph


def test_basic_graph():
    g = Graph(4, [(0, 1), (1, 2), (2, 0)])
    assert g.n == 4
    assert g.m == 3
    assert g.has_edge(1, 0)
    assert not g.has_edge(0, 3)
    assert g.adj[0] == [1, 2]
    assert g.isolated_vertices() == [3]


def test_duplicate_edges_collapsed():
    g = Graph(3, [(0, 1), (1, 0), (0, 1)])
    assert g.m == 1
    assert g.duplicate_edges == 2


def test_rejects_self_loop_and_range():
    with pytest.raises(GraphError):
        Graph(3, [(1, 1)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 3)])


def test_parse_gr():
    text = "c a comment\np tw 4 3\n1 2\n2 3\n3 1\n"
    g = parse_graph(text)
    assert g.n == 4
    assert sorted(g.edges) == [(0, 1), (0, 2), (1, 2)]


def test_parse_gr_errors():
    with pytest.raises(GraphError):
        parse_graph("1 2\n")  # edge before header
    with pytest.raises(GraphError):
        parse_graph("p tw 2 1\np tw 2 1\n")
    with pytest.raises(GraphError):
        parse_graph("p tw 2 1\n1 3\n")


def test_roundtrip():
    g = parse_graph("p tw 5 4\n1 2\n2 3\n3 4\n4 5\n")
    assert parse_graph(write_graph(g)) == g


def test_weight_map_defaults_and_scaling():
    wm = WeightMap({"S": {0: 5}}, {"S": 2})
    assert wm.weight("S", 0) == 5
    assert wm.weight("S", 1) == 2
    assert wm.weight("T", 0) == 1
    doubled = wm.scaled(2)
    assert doubled.weight("S", 0) == 10
    assert doubled.weight("S", 1) == 4


def test_parse_weights():
    wm = parse_weights("c comment\ndefault S 3\nS 2 7\n")
    assert wm.weight("S", 1) == 7
    assert wm.weight("S", 0) == 3
    with pytest.raises(GraphError):
        parse_weights("S x 1\n")
