"""Command-line front end.

Exit codes: 0 for success (or "satisfiable"), 1 for "unsatisfiable", 2 for
usage or input errors.  Results are printed as JSON on stdout; diagnostics
go to stderr.
"""

import argparse
import csv
import json
import sys
import time

from . import engine, kernels
from .checker import model_check
from .coloring import solve_3coloring
from .decomp import STRATEGIES, heuristic_decompose, parse_td, validate, write_td
from .formula import FormulaError, compile_layout, parse_formula
from .graph import GraphError, parse_graph, parse_weights
from .nicify import make_very_nice, parse_vntd, validate_very_nice, write_vntd
from .oracle import OracleCapExceeded, brute_force_check


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_graph(path):
    return parse_graph(_read(path))


def _load_formula(name_or_path):
    """A formula argument is either a bundled name or a file path."""
    from importlib import resources

    base = resources.files("tdmc") / "formulas" / f"{name_or_path}.mso"
    if base.is_file():
        return parse_formula(base.read_text())
    return parse_formula(_read(name_or_path))


def _load_weights(path):
    if path is None:
        return None
    return parse_weights(_read(path))


def _deadline(seconds):
    return None if seconds is None else time.monotonic() + seconds


def _emit(payload, out=None):
    out = out or sys.stdout
    json.dump(payload, out, indent=2)
    out.write("\n")


def cmd_decompose(args):
    g = _load_graph(args.graph)
    td = heuristic_decompose(g, strategy=args.strategy)
    problems = validate(g, td)
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return 2
    sys.stdout.write(write_td(td))
    print(f"c width {td.width()}", file=sys.stderr)
    return 0


def cmd_nicify(args):
    g = _load_graph(args.graph)
    if args.td:
        td = parse_td(_read(args.td))
    else:
        td = heuristic_decompose(g, strategy=args.strategy)
    vntd = make_very_nice(td, g)
    problems = validate_very_nice(vntd, g)
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return 2
    sys.stdout.write(write_vntd(vntd))
    return 0


def _prepare(args, g):
    if getattr(args, "vntd", None):
        return parse_vntd(_read(args.vntd))
    if getattr(args, "td", None):
        td = parse_td(_read(args.td))
    else:
        td = heuristic_decompose(g, strategy=args.strategy)
    return make_very_nice(td, g)


def cmd_color3(args):
    g = _load_graph(args.graph)
    vntd = _prepare(args, g)
    backend = kernels.get_backend(args.backend) if args.backend else None
    result = solve_3coloring(g, vntd, backend=backend, deadline=_deadline(args.timeout))
    result["backend"] = kernels.backend_name(backend)
    _emit(result)
    return 0 if result["satisfiable"] else 1


def cmd_solve(args):
    g = _load_graph(args.graph)
    f = _load_formula(args.formula)
    weights = _load_weights(args.weights)
    vntd = _prepare(args, g)
    if args.dump_layout:
        _emit(compile_layout(f, max(vntd.k, 1)).to_dict(), sys.stderr)
    result = model_check(
        g, vntd, f, weights=weights,
        empty_connected_ok=not args.nonempty_connected,
        dedup=not args.no_dedup,
        naive_join=args.naive_join,
        track_witness=not args.no_witness,
        deadline=_deadline(args.timeout))
    for line in result.diagnostics:
        print(f"warning: {line}", file=sys.stderr)
    _emit(result.to_dict())
    return 0 if result.satisfiable else 1


def cmd_oracle(args):
    g = _load_graph(args.graph)
    f = _load_formula(args.formula)
    weights = _load_weights(args.weights)
    result = brute_force_check(
        g, f, weights=weights, cap=args.cap,
        empty_connected_ok=not args.nonempty_connected)
    _emit({
        "satisfiable": result.satisfiable,
        "value": result.value,
        "witness": result.witness,
    })
    return 0 if result.satisfiable else 1


def cmd_bench(args):
    f = _load_formula(args.formula)
    writer = csv.writer(sys.stdout)
    writer.writerow(["instance", "n", "m", "width", "formula",
                     "time_ms", "states_max", "result", "value"])
    status = 0
    for path in args.graphs:
        g = _load_graph(path)
        t0 = time.perf_counter()
        try:
            vntd = _prepare(args, g)
            result = model_check(g, vntd, f, weights=None,
                                 track_witness=False,
                                 deadline=_deadline(args.timeout))
            elapsed = (time.perf_counter() - t0) * 1000.0
            writer.writerow([path, g.n, g.m, vntd.width(), args.formula,
                             f"{elapsed:.2f}", result.stats["max_states"],
                             "sat" if result.satisfiable else "unsat",
                             result.value if result.value is not None else ""])
        except engine.SimulationTimeout:
            elapsed = (time.perf_counter() - t0) * 1000.0
            writer.writerow([path, g.n, g.m, "", args.formula,
                             f"{elapsed:.2f}", "", "timeout", ""])
            status = 1
    return status


def _add_decomp_opts(p, with_vntd=True):
    p.add_argument("--td", help="read a .td decomposition instead of computing one")
    if with_vntd:
        p.add_argument("--vntd", help="read an annotated very nice decomposition")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="min-fill",
                   help="elimination heuristic (default: min-fill)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tdmc",
        description="Dynamic programming on tree decompositions: "
                    "3-coloring, and model checking for a small MSO fragment.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="compute a tree decomposition (.td)")
    p.add_argument("graph", help="graph in .gr format ('-' for stdin)")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="min-fill")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("nicify", help="turn a decomposition into a very nice one")
    p.add_argument("graph")
    _add_decomp_opts(p, with_vntd=False)
    p.set_defaults(func=cmd_nicify)

    p = sub.add_parser("color3", help="decide 3-colorability")
    p.add_argument("graph")
    _add_decomp_opts(p)
    p.add_argument("--backend", choices=["auto", "numba", "numpy"],
                   help="kernel backend (default: TDMC_KERNELS or auto)")
    p.add_argument("--timeout", type=float, help="seconds before giving up")
    p.set_defaults(func=cmd_color3)

    p = sub.add_parser("solve", help="model-check / optimize a formula")
    p.add_argument("formula", help="bundled formula name or path to a .mso file")
    p.add_argument("graph")
    _add_decomp_opts(p)
    p.add_argument("--weights", help="vertex weight file")
    p.add_argument("--nonempty-connected", action="store_true",
                   help="require connected-quantified sets to be nonempty")
    p.add_argument("--no-dedup", action="store_true",
                   help="keep duplicate states (debugging aid)")
    p.add_argument("--naive-join", action="store_true",
                   help="use the quadratic reference join")
    p.add_argument("--no-witness", action="store_true",
                   help="skip witness tracking")
    p.add_argument("--dump-layout", action="store_true",
                   help="print the bit layout to stderr")
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force check (small graphs only)")
    p.add_argument("formula")
    p.add_argument("graph")
    p.add_argument("--weights")
    p.add_argument("--cap", type=int, default=10**8,
                   help="abort if the search space exceeds this many assignments")
    p.add_argument("--nonempty-connected", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run a formula over many graphs, CSV output")
    p.add_argument("formula")
    p.add_argument("graphs", nargs="+")
    _add_decomp_opts(p)
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, FormulaError, OracleCapExceeded, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except engine.SimulationTimeout:
        print("error: timed out", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
