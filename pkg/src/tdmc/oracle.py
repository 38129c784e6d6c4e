"""Exhaustive reference semantics for the fragment (differential testing).

Assignments are enumerated over the full product space: partition
quantifiers as base-q codes, set-like variables as subset bitmasks.  The
innermost variable is evaluated as a numpy vector; everything stays a
literal transcription of the model relation, independent of the DP path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .formula import (
    ALL_ALL_EDGE,
    ALL_EXISTS_EDGE,
    ALL_VERTEX,
    EXISTS_ALL_EDGE,
    EXISTS_EXISTS_EDGE,
    EXISTS_VERTEX,
    Connected,
    Forest,
    FreeVar,
    Partition,
)
from .graph import WeightMap


class OracleCapExceeded(Exception):
    pass


@dataclass
class OracleResult:
    satisfiable: bool
    value: object  # int for optimization formulas, else None
    witness: object  # {var: sorted vertex list} or None


def _subset_connected(g, code):
    verts = [v for v in range(g.n) if code >> v & 1]
    if not verts:
        return True  # policy applied by the caller
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        x = stack.pop()
        for y in g.adj[x]:
            if code >> y & 1 and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(verts)


def _subset_forest(g, code):
    verts = [v for v in range(g.n) if code >> v & 1]
    index = {v: i for i, v in enumerate(verts)}
    parent = list(range(len(verts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        if u in index and v in index:
            ru, rv = find(index[u]), find(index[v])
            if ru == rv:
                return False
            parent[ru] = rv
    return True


def _weight_sums(g, weightfn):
    """w[code] = total weight of the subset encoded by ``code``."""
    out = np.zeros(1 << g.n, dtype=np.int64)
    for code in range(1, 1 << g.n):
        low = code & -code
        out[code] = out[code ^ low] + weightfn(low.bit_length() - 1)
    return out


class _Space:
    """Enumeration axis for one prefix entry."""

    def __init__(self, entry, g, empty_connected_ok):
        self.entry = entry
        n = g.n
        if isinstance(entry, Partition):
            self.size = len(entry.classes) ** n
            self.valid = None
        else:
            self.size = 1 << n
            if isinstance(entry, Connected):
                ok = np.fromiter((_subset_connected(g, c) for c in range(1 << n)),
                                 dtype=bool, count=1 << n)
                if not empty_connected_ok:
                    ok[0] = False
                self.valid = ok
            elif isinstance(entry, Forest):
                self.valid = np.fromiter((_subset_forest(g, c) for c in range(1 << n)),
                                         dtype=bool, count=1 << n)
            else:
                self.valid = None


def _member(entry, code, v):
    """Membership arrays per variable name for assignment ``code``."""
    if isinstance(entry, Partition):
        q = len(entry.classes)
        digit = (code // q ** v) % q
        return {name: digit == i for i, name in enumerate(entry.classes)}
    return {entry.name: (code >> v) & 1 != 0}


def _cnf_value(cnf, member_u, member_v, equal):
    total = None
    for disj in cnf:
        val = None
        for lit in disj:
            if lit.var == "=":
                b = equal
            elif lit.arg == "x":
                b = member_u[lit.var]
            else:
                b = member_v[lit.var]
            if lit.negated:
                b = ~b if isinstance(b, np.ndarray) else (not b)
            val = b if val is None else (val | b)
        total = val if total is None else (total & val)
    return total if total is not None else True


def _clause_mask(clause, g, members_per_vertex, ones):
    """Vectorized truth value of one clause over the enumeration axis."""
    shape = clause.shape
    if shape == ALL_VERTEX or shape == EXISTS_VERTEX:
        acc = ones.copy() if shape == ALL_VERTEX else ~ones
        for u in range(g.n):
            val = _cnf_value(clause.cnf, members_per_vertex[u], None, False)
            acc = (acc & val) if shape == ALL_VERTEX else (acc | val)
        return acc
    if shape == ALL_ALL_EDGE:
        acc = ones.copy()
        for u, v in g.edges:
            acc &= _cnf_value(clause.cnf, members_per_vertex[u], members_per_vertex[v], False)
            acc &= _cnf_value(clause.cnf, members_per_vertex[v], members_per_vertex[u], False)
        return acc
    if shape == ALL_EXISTS_EDGE:
        acc = ones.copy()
        for u in range(g.n):
            found = ~ones
            for v in g.adj[u]:
                found |= _cnf_value(clause.cnf, members_per_vertex[u], members_per_vertex[v], False)
            acc &= found
        return acc
    if shape == EXISTS_ALL_EDGE:
        acc = ~ones
        for u in range(g.n):
            all_v = ones.copy()
            for v in g.adj[u]:
                all_v &= _cnf_value(clause.cnf, members_per_vertex[u], members_per_vertex[v], False)
            acc |= all_v
        return acc
    if shape == EXISTS_EXISTS_EDGE:
        acc = ~ones
        for u, v in g.edges:
            acc |= _cnf_value(clause.cnf, members_per_vertex[u], members_per_vertex[v], False)
            acc |= _cnf_value(clause.cnf, members_per_vertex[v], members_per_vertex[u], False)
        return acc
    raise ValueError(f"unknown clause shape {shape!r}")


def _decode(entry, code, n):
    if isinstance(entry, Partition):
        q = len(entry.classes)
        out = {name: [] for name in entry.classes}
        for v in range(n):
            out[entry.classes[(code // q ** v) % q]].append(v)
        return out
    return {entry.name: [v for v in range(n) if code >> v & 1]}


def brute_force_check(g, f, weights=None, cap=10 ** 8, empty_connected_ok=True):
    """Exact verdict, optimum, and one optimal witness by full enumeration.

    Raises :class:`OracleCapExceeded` when the assignment space is larger
    than ``cap``.  Witness ties break by enumeration order (declaration
    order of variables, ascending codes).
    """
    weights = weights or WeightMap()
    spaces = [_Space(e, g, empty_connected_ok) for e in f.prefix]
    total = 1
    for s in spaces:
        total *= s.size
    if total > cap:
        raise OracleCapExceeded(f"assignment space {total} exceeds cap {cap}")

    free_sums = {}
    for e in f.prefix:
        if isinstance(e, FreeVar):
            free_sums[e.name] = _weight_sums(g, lambda v, name=e.name: weights.weight(name, v))

    optimizing = f.objective != "decision"
    sign = -1 if f.objective == "maximize" else 1

    # Vectorize the largest axis; loop the rest.
    if spaces:
        vec_i = max(range(len(spaces)), key=lambda i: spaces[i].size)
    else:
        vec_i = None
    best_value = None
    best_codes = None
    found = False

    outer = [range(s.size) for i, s in enumerate(spaces) if i != vec_i]
    outer_entries = [s.entry for i, s in enumerate(spaces) if i != vec_i]
    for combo in itertools.product(*outer):
        # Validity of outer set-like variables.
        ok = True
        for (i, s), code in zip([(i, s) for i, s in enumerate(spaces) if i != vec_i], combo):
            if s.valid is not None and not s.valid[code]:
                ok = False
                break
        if not ok:
            continue
        if vec_i is not None:
            vec_space = spaces[vec_i]
            codes = np.arange(vec_space.size, dtype=np.int64)
            mask = vec_space.valid.copy() if vec_space.valid is not None else np.ones(vec_space.size, dtype=bool)
        else:
            codes = np.zeros(1, dtype=np.int64)
            mask = np.ones(1, dtype=bool)
        ones = np.ones(codes.shape[0], dtype=bool)

        members_per_vertex = []
        for v in range(g.n):
            m = {}
            for (i, s), code in zip([(i, s) for i, s in enumerate(spaces) if i != vec_i], combo):
                for name, val in _member(s.entry, code, v).items():
                    m[name] = val if isinstance(val, np.ndarray) else (ones if val else ~ones)
            if vec_i is not None:
                for name, val in _member(spaces[vec_i].entry, codes, v).items():
                    m[name] = val
            members_per_vertex.append(m)

        for clause in f.clauses:
            if not mask.any():
                break
            mask &= _clause_mask(clause, g, members_per_vertex, ones)
        if not mask.any():
            continue

        found = True
        if not optimizing:
            idx = int(np.argmax(mask))
            best_codes = (combo, int(codes[idx]))
            break
        values = np.zeros(codes.shape[0], dtype=np.int64)
        for (i, s), code in zip([(i, s) for i, s in enumerate(spaces) if i != vec_i], combo):
            if isinstance(s.entry, FreeVar):
                values += sign * free_sums[s.entry.name][code]
        if vec_i is not None and isinstance(spaces[vec_i].entry, FreeVar):
            values = values + sign * free_sums[spaces[vec_i].entry.name][codes]
        masked = np.where(mask, values, np.iinfo(np.int64).max)
        idx = int(np.argmin(masked))
        if best_value is None or masked[idx] < best_value:
            best_value = int(masked[idx])
            best_codes = (combo, int(codes[idx]))

    if not found:
        return OracleResult(False, None, None)

    combo, vec_code = best_codes
    witness = {}
    it = iter(combo)
    for i, s in enumerate(spaces):
        code = vec_code if i == vec_i else next(it)
        for name, verts in _decode(s.entry, code, g.n).items():
            if not name.startswith("~"):
                witness[name] = verts
    value = sign * best_value if optimizing else None
    return OracleResult(True, value, witness)


def verify_witness(g, f, weights, witness, empty_connected_ok=True):
    """Literal evaluation of the model relation for a concrete assignment."""
    sets = {}
    for e in f.prefix:
        if isinstance(e, Partition):
            assigned = {}
            for name in e.classes:
                if name.startswith("~") and name not in witness:
                    continue
                if name not in witness:
                    raise KeyError(f"witness missing variable {name!r}")
                for v in witness[name]:
                    if v in assigned:
                        return False
                    assigned[v] = name
                sets[name] = set(witness[name])
            for name in e.classes:
                if name.startswith("~") and name not in sets:
                    sets[name] = set(range(g.n)) - {v for v in assigned}
                    for v in sets[name]:
                        assigned[v] = name
            if len(assigned) != g.n:
                return False
        else:
            if e.name not in witness:
                raise KeyError(f"witness missing variable {e.name!r}")
            sets[e.name] = set(witness[e.name])
            code = sum(1 << v for v in sets[e.name])
            if isinstance(e, Connected):
                if code == 0:
                    if not empty_connected_ok:
                        return False
                elif not _subset_connected(g, code):
                    return False
            elif isinstance(e, Forest):
                if not _subset_forest(g, code):
                    return False

    def member(name, v):
        return v in sets[name]

    def cnf(cnf_matrix, u, v):
        for disj in cnf_matrix:
            ok = False
            for lit in disj:
                if lit.var == "=":
                    b = u == v
                elif lit.arg == "x":
                    b = member(lit.var, u)
                else:
                    b = member(lit.var, v)
                if lit.negated:
                    b = not b
                if b:
                    ok = True
                    break
            if not ok:
                return False
        return True

    for clause in f.clauses:
        s = clause.shape
        if s == ALL_VERTEX:
            if not all(cnf(clause.cnf, u, None) for u in range(g.n)):
                return False
        elif s == EXISTS_VERTEX:
            if not any(cnf(clause.cnf, u, None) for u in range(g.n)):
                return False
        elif s == ALL_ALL_EDGE:
            if not all(cnf(clause.cnf, u, v) and cnf(clause.cnf, v, u) for u, v in g.edges):
                return False
        elif s == ALL_EXISTS_EDGE:
            if not all(any(cnf(clause.cnf, u, v) for v in g.adj[u]) for u in range(g.n)):
                return False
        elif s == EXISTS_ALL_EDGE:
            if not any(all(cnf(clause.cnf, u, v) for v in g.adj[u]) for u in range(g.n)):
                return False
        elif s == EXISTS_EXISTS_EDGE:
            if not any(cnf(clause.cnf, u, v) or cnf(clause.cnf, v, u) for u, v in g.edges):
                return False
    return True


def three_coloring_by_enumeration(g):
    """Independent direct 3-coloring check (second oracle for the formula path)."""
    for coloring in itertools.product(range(3), repeat=g.n):
        if all(coloring[u] != coloring[v] for u, v in g.edges):
            return True
    return g.n == 0
