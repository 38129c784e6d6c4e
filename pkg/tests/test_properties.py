"""Property-based tests for the structural invariants."""

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import builtin_formula
from tdmc.checker import solve
from tdmc.decomp import heuristic_decompose, parse_td, validate, write_td
from tdmc.formula import compile_layout
from tdmc.graph import Graph, parse_graph, write_graph
from tdmc.nicify import make_very_nice, validate_very_nice
from tdmc.oracle import brute_force_check


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(min_value=0, max_value=max_n))
    possible = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(possible), unique=True)) if possible else []
    return Graph(n, edges)


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_graph_roundtrip(g):
    assert parse_graph(write_graph(g)) == g


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_pipeline_always_valid(g):
    td = heuristic_decompose(g)
    assert validate(g, td) == []
    assert parse_td(write_td(td)).bags == td.bags
    vntd = make_very_nice(td, g)
    assert validate_very_nice(vntd, g) == []
    assert vntd.width() == td.width()


@given(graphs(max_n=7), st.sampled_from(["vc", "is", "ds", "3col"]))
@settings(max_examples=40, deadline=None)
def test_checker_matches_oracle(g, name):
    f = builtin_formula(name)
    o = brute_force_check(g, f)
    r = solve(g, f)
    assert (o.satisfiable, o.value) == (r.satisfiable, r.value)


@given(st.sampled_from(["3col", "vc", "ds", "is", "fvs", "triangle-minor"]),
       st.integers(min_value=1, max_value=12))
@settings(max_examples=40, deadline=None)
def test_layout_groups_disjoint_and_packed(name, k):
    layout = compile_layout(builtin_formula(name), k)
    seen = 0
    for grp in layout.groups:
        mask = grp.group_mask()
        assert seen & mask == 0  # no overlap between groups
        seen |= mask
    assert seen == (1 << layout.total_bits) - 1  # no gaps
