import pytest

from conftest import complete_graph, cycle_graph, grid_graph, random_graph
from tdmc import kernels
from tdmc.coloring import solve_3coloring
from tdmc.decomp import heuristic_decompose
from tdmc.graph import Graph
from tdmc.nicify import make_very_nice
from tdmc.oracle import three_coloring_by_enumeration

BACKENDS = ["numpy", "numba"]


def available(name):
    try:
        kernels.get_backend(name)
        return True
    except ImportError:
        return False


@pytest.fixture(params=[b for b in BACKENDS if available(b)])
def backend(request):
    return kernels.get_backend(request.param)


def test_known_instances(backend):
    assert solve_3coloring(cycle_graph(5), backend=backend)["satisfiable"]
    assert solve_3coloring(cycle_graph(6), backend=backend)["satisfiable"]
    assert not solve_3coloring(complete_graph(4), backend=backend)["satisfiable"]
    assert solve_3coloring(complete_graph(3), backend=backend)["satisfiable"]
    assert solve_3coloring(grid_graph(3, 3), backend=backend)["satisfiable"]
    assert solve_3coloring(Graph(1, []), backend=backend)["satisfiable"]


def test_matches_enumeration(backend, rng):
    for _ in range(40):
        n = rng.randint(1, 9)
        g = random_graph(rng, n, rng.choice([0.3, 0.6]))
        got = solve_3coloring(g, backend=backend)["satisfiable"]
        assert got == three_coloring_by_enumeration(g)


def test_backends_agree(rng):
    names = [b for b in BACKENDS if available(b)]
    if len(names) < 2:
        pytest.skip("only one backend available")
    for _ in range(20):
        g = random_graph(rng, rng.randint(2, 10), 0.4)
        vntd = make_very_nice(heuristic_decompose(g), g)
        answers = {
            name: solve_3coloring(g, vntd, backend=kernels.get_backend(name))["satisfiable"]
            for name in names
        }
        assert len(set(answers.values())) == 1


def test_state_counts_bounded(rng):
    g = grid_graph(3, 6)
    vntd = make_very_nice(heuristic_decompose(g), g)
    from tdmc.coloring import coloring_factory
    from tdmc.engine import simulate

    result = simulate(vntd, coloring_factory())
    for stat, node in zip(result.node_stats, vntd.nodes):
        assert stat.states <= 3 ** len(node.bag)
