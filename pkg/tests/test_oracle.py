import pytest

from conftest import builtin_formula, complete_graph, cycle_graph, path_graph
from tdmc.formula import parse_formula
from tdmc.graph import Graph, WeightMap
from tdmc.oracle import (
    OracleCapExceeded,
    brute_force_check,
    three_coloring_by_enumeration,
    verify_witness,
)


def test_vertex_cover_values():
    vc = builtin_formula("vc")
    assert brute_force_check(complete_graph(3), vc).value == 2
    assert brute_force_check(path_graph(3), vc).value == 1
    assert brute_force_check(cycle_graph(5), vc).value == 3
    assert brute_force_check(Graph(3, []), vc).value == 0


def test_independent_set_maximize():
    iset = builtin_formula("is")
    assert brute_force_check(complete_graph(3), iset).value == 1
    assert brute_force_check(cycle_graph(5), iset).value == 2
    assert brute_force_check(Graph(4, []), iset).value == 4


def test_dominating_set():
    ds = builtin_formula("ds")
    star = Graph(5, [(0, i) for i in range(1, 5)])
    assert brute_force_check(star, ds).value == 1
    # an isolated vertex makes the all-exists clause unsatisfiable
    r = brute_force_check(Graph(2, []), ds)
    assert not r.satisfiable


def test_three_coloring():
    col = builtin_formula("3col")
    assert not brute_force_check(complete_graph(4), col).satisfiable
    assert brute_force_check(cycle_graph(5), col).satisfiable
    assert brute_force_check(complete_graph(4), col).witness is None


def test_fvs():
    fvs = builtin_formula("fvs")
    assert brute_force_check(complete_graph(4), fvs).value == 2
    assert brute_force_check(cycle_graph(6), fvs).value == 1
    assert brute_force_check(path_graph(5), fvs).value == 0


def test_triangle_minor_iff_cycle():
    tm = builtin_formula("triangle-minor")
    assert brute_force_check(complete_graph(3), tm).satisfiable
    assert brute_force_check(cycle_graph(6), tm).satisfiable
    assert not brute_force_check(path_graph(6), tm).satisfiable
    assert not brute_force_check(Graph(4, [(0, 1), (1, 2), (1, 3)]), tm).satisfiable


def test_weights_respected():
    vc = builtin_formula("vc")
    g = path_graph(3)  # cover is {middle} with unit weights
    heavy_mid = WeightMap({"S": {1: 10}})
    r = brute_force_check(g, vc, weights=heavy_mid)
    assert r.value == 2  # now the two endpoints win
    assert sorted(r.witness["S"]) == [0, 2]


def test_nonempty_connected_flag():
    f = parse_formula("connected C;\nforall x (C(x) | !C(x));\n")
    g = Graph(2, [])
    assert brute_force_check(g, f, empty_connected_ok=True).satisfiable
    # with two isolated vertices, any nonempty C of size 1 is still connected
    assert brute_force_check(g, f, empty_connected_ok=False).satisfiable
    full = parse_formula("connected C;\nforall x (C(x));\n")
    assert not brute_force_check(g, full).satisfiable  # {0,1} is disconnected


def test_cap():
    vc = builtin_formula("vc")
    with pytest.raises(OracleCapExceeded):
        brute_force_check(complete_graph(8), vc, cap=10)


def test_verify_witness():
    vc = builtin_formula("vc")
    g = cycle_graph(4)
    assert verify_witness(g, vc, None, {"S": [0, 2]})
    assert not verify_witness(g, vc, None, {"S": [0]})
    col = builtin_formula("3col")
    assert verify_witness(g, col, None, {"R": [0, 2], "G": [1, 3], "B": []})
    assert not verify_witness(g, col, None, {"R": [0, 1], "G": [2, 3], "B": []})


def test_enumeration_helper():
    assert three_coloring_by_enumeration(cycle_graph(5))
    assert not three_coloring_by_enumeration(complete_graph(4))
