"""Compare the numba and numpy kernel backends on 3-coloring instances.

Usage: python benchmarks/bench_kernels.py [--rows R] [--cols C] [--trials N]

Runs the 3-coloring automaton over grid graphs and random graphs with both
backends and prints a small table.  The first numba run includes JIT
compilation; a warm-up run is done first so the timings are steady-state.
"""

import argparse
import random
import time

from tdmc import kernels
from tdmc.coloring import solve_3coloring
from tdmc.decomp import heuristic_decompose
from tdmc.graph import Graph
from tdmc.nicify import make_very_nice


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


def random_graph(n, p, rng):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


def instances(args):
    rng = random.Random(args.seed)
    yield f"grid {args.rows}x{args.cols}", grid_graph(args.rows, args.cols)
    for i in range(args.trials):
        yield f"random n=40 p=0.08 #{i}", random_graph(40, 0.08, rng)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=6)
    ap.add_argument("--cols", type=int, default=40)
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = []
    for name in ("numpy", "numba"):
        try:
            backends.append(kernels.get_backend(name))
        except ImportError:
            print(f"backend {name} unavailable, skipping")

    # Warm up (numba JIT compilation) on a tiny instance.
    tiny = make_very_nice(heuristic_decompose(grid_graph(2, 3)), grid_graph(2, 3))
    for be in backends:
        solve_3coloring(grid_graph(2, 3), tiny, backend=be)

    print(f"{'instance':<24} {'width':>5} " + " ".join(f"{be.NAME + ' (s)':>12}" for be in backends))
    totals = {be.NAME: 0.0 for be in backends}
    for label, g in instances(args):
        vntd = make_very_nice(heuristic_decompose(g), g)
        row = f"{label:<24} {vntd.width():>5}"
        answers = set()
        for be in backends:
            t0 = time.perf_counter()
            result = solve_3coloring(g, vntd, backend=be)
            dt = time.perf_counter() - t0
            totals[be.NAME] += dt
            answers.add(result["satisfiable"])
            row += f" {dt:>12.4f}"
        assert len(answers) == 1, "backends disagree"
        print(row)
    print(f"{'total':<24} {'':>5}" + "".join(f" {totals[be.NAME]:>12.4f}" for be in backends))


if __name__ == "__main__":
    main()
