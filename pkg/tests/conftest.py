import random
from importlib import resources

import pytest

from tdmc.formula import parse_formula
from tdmc.graph import Graph

_FORMULAS = {}


def builtin_formula(name):
    if name not in _FORMULAS:
        text = (resources.files("tdmc") / "formulas" / f"{name}.mso").read_text()
        _FORMULAS[name] = parse_formula(text)
    return _FORMULAS[name]


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


def grid_graph(rows, cols):
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture
def rng():
    return random.Random(12345)
