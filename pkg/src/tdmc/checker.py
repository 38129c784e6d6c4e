"""The model-checking tree automaton for the fragment.

States are packed bit vectors laid out by :func:`tdmc.formula.compile_layout`
plus an integer objective accumulator and a provenance back-pointer for
witness extraction.  Each engine hook builds a per-node transition table
memoized on the bits it actually reads, so large vectors share work.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from . import engine
from .decomp import heuristic_decompose
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
    compile_layout,
)
from .graph import WeightMap
from .nicify import make_very_nice


@dataclass
class CheckResult:
    satisfiable: bool
    value: object  # optimal objective for optimization formulas, else None
    witness: object  # {var: sorted vertex list} or None
    stats: dict
    diagnostics: list

    def to_dict(self):
        return {
            "satisfiable": self.satisfiable,
            "value": self.value,
            "witness": self.witness,
            "stats": self.stats,
            "diagnostics": self.diagnostics,
        }


class Provenance:
    """Append-only store of back-pointers (compact parallel arrays)."""

    LEAF = -1

    def __init__(self):
        self.parent1 = array("q")
        self.parent2 = array("q")
        self.payload = array("q")
        self.leaf = self.add(-1, -1, 0)

    def add(self, p1, p2, payload):
        self.parent1.append(p1)
        self.parent2.append(p2)
        self.payload.append(payload)
        return len(self.parent1) - 1

    def add_intro(self, parent, vertex, member_mask):
        return self.add(parent, -1, (vertex << 40) | member_mask)

    def add_join(self, left, right):
        return self.add(left, right, -1)

    def walk_members(self, start):
        """Collect (vertex, membership mask) pairs along an accepting run."""
        out = {}
        stack = [start]
        while stack:
            i = stack.pop()
            p1, p2, pay = self.parent1[i], self.parent2[i], self.payload[i]
            if p1 < 0:
                continue
            if p2 >= 0:
                stack.append(p1)
                stack.append(p2)
                continue
            out[pay >> 40] = pay & ((1 << 40) - 1)
            stack.append(p1)
        return out


def _canonical(group, bits):
    """Relabel a component group's ids by first occurrence over the slots."""
    sb = group.slot_bits
    mask = (1 << sb) - 1
    base = group.offset
    mapping = {}
    nxt = 1
    out = bits
    for j in range(group.slots):
        off = base + j * sb
        val = (bits >> off) & mask
        if val:
            new = mapping.get(val)
            if new is None:
                new = mapping[val] = nxt
                nxt += 1
            if new != val:
                out = (out & ~(mask << off)) | (new << off)
    return out


class CheckerContext:
    """Everything shared by one model-checking run."""

    def __init__(self, formula, layout, weights, sign, empty_connected_ok=True,
                 dedup=True, naive_join=False, track_witness=True, collect_states=False):
        self.formula = formula
        self.layout = layout
        self.weights = weights
        self.sign = sign
        self.empty_connected_ok = empty_connected_ok
        self.dedup = dedup
        self.naive_join = naive_join
        self.track_witness = track_witness
        self.collect_states = collect_states
        self.snapshots = []
        self.counters = {}
        self.prov = Provenance() if track_witness else None

        prefix_kinds = ("free", "partition", "connected", "forest")
        self.qgroups = [grp for grp in layout.groups if grp.kind in prefix_kinds]
        self.cgroups = [grp for grp in layout.groups if grp.kind not in prefix_kinds]
        self.member_index = {name: i for i, name in enumerate(formula.membership_vars)}
        self.sym_mask = layout.sym_mask
        self.asym_mask = ((1 << layout.total_bits) - 1) ^ self.sym_mask
        self.clause_evals = {}
        for grp in self.cgroups:
            self.clause_evals[id(grp)] = self._compile_cnf(grp.ref.cnf)

    def _compile_cnf(self, cnf):
        """CNF over membership masks; returns f(mask_x, mask_y) -> bool."""
        compiled = []
        for disj in cnf:
            lits = []
            for lit in disj:
                if lit.var == "=":
                    lits.append((lit.negated, None, None))
                else:
                    lits.append((lit.negated, 1 << self.member_index[lit.var], lit.arg))
            compiled.append(lits)

        def evaluate(mx, my):
            for lits in compiled:
                ok = False
                for neg, bit, arg in lits:
                    if bit is None:
                        b = False  # x=y never holds for a real edge
                    else:
                        b = ((mx if arg == "x" else my) & bit) != 0
                    if neg:
                        b = not b
                    if b:
                        ok = True
                        break
                if not ok:
                    return False
            return True

        return evaluate

    def weight_of(self, name, v):
        return self.sign * self.weights.weight(name, v)

    # -- component-group helpers ------------------------------------------

    def intro_component(self, group, bits, slot):
        """Put the introduced vertex into its own fresh component."""
        if group.kind == "connected":
            if bits >> group.extra_offset() & 1:
                return None  # the single component is already closed
        out = bits | (group.domain - 1) << group.slot_offset(slot)
        return _canonical(group, out)

    def forget_component(self, group, bits, slot):
        val = group.slot_value(bits, slot)
        if val == 0:
            return bits
        cleared = bits & ~group.slot_mask(slot)
        if group.kind == "forest":
            return _canonical(group, cleared)
        same = False
        others = False
        for j in range(group.slots):
            if j == slot:
                continue
            v2 = group.slot_value(bits, j)
            if v2 == val:
                same = True
            if v2 != 0:
                others = True
        if same:
            return _canonical(group, cleared)
        if others:
            return None  # last vertex of its component, but the set goes on
        if cleared >> group.extra_offset() & 1:
            return None  # a second completed component is not allowed
        return _canonical(group, cleared | 1 << group.extra_offset())

    def merge_components(self, group, bits, su, sv):
        vu = group.slot_value(bits, su)
        vv = group.slot_value(bits, sv)
        if vu == 0 or vv == 0:
            return bits
        if vu == vv:
            if group.kind == "forest":
                return None  # edge inside one component closes a cycle
            return bits
        lo, hi = min(vu, vv), max(vu, vv)
        out = bits
        sb = group.slot_bits
        mask = (1 << sb) - 1
        for j in range(group.slots):
            off = group.slot_offset(j)
            if (bits >> off) & mask == hi:
                out = (out & ~(mask << off)) | (lo << off)
        return _canonical(group, out)

    def join_components(self, group, bitsY, bitsZ):
        """Merge two component labelings over the same bag; None on reject."""
        k = group.slots
        valsY = [group.slot_value(bitsY, j) for j in range(k)]
        valsZ = [group.slot_value(bitsZ, j) for j in range(k)]
        members = [j for j in range(k) if valsY[j]]
        if members != [j for j in range(k) if valsZ[j]]:
            return None
        if group.kind == "connected":
            doneY = bitsY >> group.extra_offset() & 1
            doneZ = bitsZ >> group.extra_offset() & 1
            if doneY and doneZ:
                return None
            if (doneY or doneZ) and members:
                return None
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        forest = group.kind == "forest"
        for vals in (valsY, valsZ):
            first = {}
            for j in members:
                label = vals[j]
                if label in first:
                    ra, rb = find(first[label]), find(j)
                    if ra == rb:
                        if forest:
                            return None  # two vertices already connected twice
                        continue
                    parent[ra] = rb
                else:
                    first[label] = j
        out = 0
        labels = {}
        nxt = 1
        for j in members:
            r = find(j)
            if r not in labels:
                labels[r] = nxt
                nxt += 1
            out |= labels[r] << group.slot_offset(j)
        if group.kind == "connected" and (bitsY | bitsZ) >> group.extra_offset() & 1:
            out |= 1 << group.extra_offset()
        return out

    # -- membership extraction --------------------------------------------

    def member_mask_for_slot(self, bits, slot):
        mask = 0
        for grp in self.qgroups:
            val = grp.slot_value(bits, slot)
            e = grp.ref
            if isinstance(e, FreeVar):
                if val:
                    mask |= 1 << self.member_index[e.name]
            elif isinstance(e, Partition):
                mask |= 1 << self.member_index[e.classes[val]]
            else:
                if val:
                    mask |= 1 << self.member_index[e.name]
        return mask


class CheckerVector:
    """Deduplicated map bits -> (best value, provenance)."""

    def __init__(self, ctx, states=None):
        self.ctx = ctx
        # dedup mode: dict bits -> (value, prov); raw mode: list of triples
        if states is None:
            prov = ctx.prov.leaf if ctx.prov else 0
            states = {0: (0, prov)} if ctx.dedup else [(0, 0, prov)]
        self.states = states
        self.counters = ctx.counters
        if ctx.collect_states:
            ctx.snapshots.append(self.bit_set())

    def __len__(self):
        return len(self.states)

    def bit_set(self):
        if self.ctx.dedup:
            return frozenset(self.states)
        return frozenset(b for b, _, _ in self.states)

    def iter_triples(self):
        if self.ctx.dedup:
            for bits, (value, prov) in self.states.items():
                yield bits, value, prov
        else:
            yield from self.states

    def _collect(self, triples):
        ctx = self.ctx
        if ctx.dedup:
            out = {}
            for bits, value, prov in triples:
                old = out.get(bits)
                if old is None or value < old[0]:
                    out[bits] = (value, prov)
        else:
            out = list(triples)
        return CheckerVector(ctx, out)

    # -- hooks -------------------------------------------------------------

    def introduce(self, bag, v, idx):
        ctx = self.ctx
        slot = idx[v]
        combos = self._intro_combos(v, slot)
        dyn_groups = [grp for grp in ctx.qgroups if grp.kind in ("connected", "forest")]
        dyn_mask = 0
        for grp in dyn_groups:
            dyn_mask |= grp.group_mask()
        memo = {}
        prov = ctx.prov

        def successors(dkey):
            out = []
            for patch, wdelta, member, dyn in combos:
                cur = dkey
                ok = True
                for grp in dyn:
                    cur = ctx.intro_component(grp, cur, slot)
                    if cur is None:
                        ok = False
                        break
                if ok:
                    out.append(((cur & dyn_mask) | patch, wdelta, member))
            return out

        def gen():
            for bits, value, p in self.iter_triples():
                dkey = bits & dyn_mask
                succ = memo.get(dkey)
                if succ is None:
                    succ = memo[dkey] = successors(dkey)
                base = bits & ~dyn_mask
                for patch, wdelta, member in succ:
                    np_ = prov.add_intro(p, v, member) if prov else 0
                    yield base | patch, value + wdelta, np_

        return self._collect(gen())

    def _intro_combos(self, v, slot):
        """Static choice templates: (patch, weight delta, member mask, dyn groups)."""
        ctx = self.ctx
        combos = [(0, 0, 0, ())]
        for grp in ctx.qgroups:
            e = grp.ref
            new = []
            if isinstance(e, FreeVar):
                bit = 1 << grp.slot_offset(slot)
                mb = 1 << ctx.member_index[e.name]
                w = ctx.weight_of(e.name, v)
                for patch, wd, mm, dyn in combos:
                    new.append((patch, wd, mm, dyn))
                    new.append((patch | bit, wd + w, mm | mb, dyn))
            elif isinstance(e, Partition):
                for c, name in enumerate(e.classes):
                    bit = c << grp.slot_offset(slot)
                    mb = 1 << ctx.member_index[name]
                    for patch, wd, mm, dyn in combos:
                        new.append((patch | bit, wd, mm | mb, dyn))
            else:
                mb = 1 << ctx.member_index[e.name]
                for patch, wd, mm, dyn in combos:
                    new.append((patch, wd, mm, dyn))
                    new.append((patch, wd, mm | mb, dyn + (grp,)))
            combos = new
        out = []
        for patch, wd, mm, dyn in combos:
            rejected = False
            for grp in ctx.cgroups:
                shape = grp.kind
                if shape == ALL_VERTEX:
                    if not ctx.clause_evals[id(grp)](mm, 0):
                        rejected = True
                        break
                elif shape == EXISTS_VERTEX:
                    if ctx.clause_evals[id(grp)](mm, 0):
                        patch |= 1 << grp.extra_offset()
                elif shape == EXISTS_ALL_EDGE:
                    patch |= 1 << grp.slot_offset(slot)
            if not rejected:
                out.append((patch, wd, mm, dyn))
        return out

    def forget(self, bag, v, idx):
        ctx = self.ctx
        slot = idx[v]
        rel = 0
        for grp in ctx.qgroups:
            if grp.kind in ("connected", "forest"):
                rel |= grp.group_mask()
            else:
                rel |= grp.slot_mask(slot)
        ae_groups = [g for g in ctx.cgroups if g.kind == ALL_EXISTS_EDGE]
        ea_groups = [g for g in ctx.cgroups if g.kind == EXISTS_ALL_EDGE]
        for grp in ae_groups:
            rel |= grp.slot_mask(slot)
        for grp in ea_groups:
            rel |= grp.group_mask()

        def transform(key):
            cur = key
            for grp in ctx.qgroups:
                if grp.kind in ("connected", "forest"):
                    cur = ctx.forget_component(grp, cur, slot)
                    if cur is None:
                        return None
                else:
                    cur &= ~grp.slot_mask(slot)
            for grp in ae_groups:
                if not cur >> grp.slot_offset(slot) & 1:
                    return None  # vertex leaves the bag undominated
                cur &= ~grp.slot_mask(slot)
            for grp in ea_groups:
                if cur >> grp.slot_offset(slot) & 1:
                    cur = (cur & ~grp.slot_mask(slot)) | 1 << grp.extra_offset()
            return cur

        return self._keyed_transform(rel, transform)

    def edge(self, bag, u, v, idx):
        ctx = self.ctx
        su, sv = idx[u], idx[v]
        comp_groups = [g for g in ctx.qgroups if g.kind in ("connected", "forest")]
        rel = 0
        for grp in ctx.qgroups:
            if grp.kind in ("connected", "forest"):
                rel |= grp.group_mask()
            else:
                rel |= grp.slot_mask(su) | grp.slot_mask(sv)
        for grp in ctx.cgroups:
            rel |= grp.group_mask()

        def transform(key):
            mu = ctx.member_mask_for_slot(key, su)
            mv = ctx.member_mask_for_slot(key, sv)
            cur = key
            for grp in ctx.cgroups:
                shape = grp.kind
                ev = ctx.clause_evals[id(grp)]
                uv = ev(mu, mv)
                vu = ev(mv, mu)
                if shape == ALL_ALL_EDGE:
                    if not (uv and vu):
                        return None
                elif shape == ALL_EXISTS_EDGE:
                    if uv:
                        cur |= 1 << grp.slot_offset(su)
                    if vu:
                        cur |= 1 << grp.slot_offset(sv)
                elif shape == EXISTS_ALL_EDGE:
                    if not uv:
                        cur &= ~grp.slot_mask(su)
                    if not vu:
                        cur &= ~grp.slot_mask(sv)
                elif shape == EXISTS_EXISTS_EDGE:
                    if uv or vu:
                        cur |= 1 << grp.extra_offset()
            for grp in comp_groups:
                cur = ctx.merge_components(grp, cur, su, sv)
                if cur is None:
                    return None
            return cur

        return self._keyed_transform(rel, transform)

    def _keyed_transform(self, rel, transform):
        memo = {}

        def gen():
            for bits, value, p in self.iter_triples():
                key = bits & rel
                if key in memo:
                    patch = memo[key]
                else:
                    patch = memo[key] = transform(key)
                if patch is not None:
                    yield (bits & ~rel) | patch, value, p

        return self._collect(gen())

    def join(self, bag, other, idx):
        ctx = self.ctx
        sym_mask = ctx.sym_mask
        asym_mask = ctx.asym_mask
        comp_groups = [g for g in ctx.qgroups if g.kind in ("connected", "forest")]
        free_groups = [g for g in ctx.qgroups if g.kind == "free"]
        shared_memo = {}
        combine_memo = {}
        prov = ctx.prov

        def shared_weight(key):
            w = shared_memo.get(key)
            if w is None:
                w = 0
                for grp in free_groups:
                    name = grp.ref.name
                    for v in bag:
                        if key >> grp.slot_offset(idx[v]) & 1:
                            w += ctx.weight_of(name, v)
                shared_memo[key] = w
            return w

        def combine_bits(aY, aZ):
            ck = (aY, aZ)
            if ck in combine_memo:
                return combine_memo[ck]
            cur = 0
            ok = True
            for grp in ctx.cgroups:
                shape = grp.kind
                gm = grp.group_mask()
                if shape == ALL_EXISTS_EDGE or shape == EXISTS_EXISTS_EDGE or shape == EXISTS_VERTEX:
                    cur |= (aY | aZ) & gm
                elif shape == EXISTS_ALL_EDGE:
                    slot_bits = gm ^ (1 << grp.extra_offset())
                    cur |= aY & aZ & slot_bits
                    cur |= (aY | aZ) & (1 << grp.extra_offset())
            for grp in comp_groups:
                merged = ctx.join_components(grp, aY, aZ)
                if merged is None:
                    ok = False
                    break
                cur |= merged
            result = cur if ok else None
            combine_memo[ck] = result
            return result

        def combine(a, b):
            bitsY, valY, pY = a
            bitsZ, valZ, pZ = b
            if bitsY & sym_mask != bitsZ & sym_mask:
                return None  # only reachable through the naive join
            merged = combine_bits(bitsY & asym_mask, bitsZ & asym_mask)
            if merged is None:
                return None
            key = bitsY & sym_mask
            value = valY + valZ - shared_weight(key)
            np_ = prov.add_join(pY, pZ) if prov else 0
            return key | merged, value, np_

        def sym_key(triple):
            # Refine the symmetric-bits key with each component group's
            # membership mask: joinable states must agree on those too.
            bits = triple[0]
            key = bits & sym_mask
            for grp in comp_groups:
                inmask = 0
                for j in range(grp.slots):
                    if grp.slot_value(bits, j):
                        inmask |= 1 << j
                key = (key << grp.slots) | inmask
            return key

        joiner = engine.join_naive if ctx.naive_join else engine.join_bucketed
        triples = joiner(list(self.iter_triples()), list(other.iter_triples()),
                         sym_key, combine, ctx.counters)
        return self._collect(triples)


def checker_factory(ctx):
    return lambda: CheckerVector(ctx)


def accept(root_vector, ctx):
    """Pick the best accepting root state; root bags are empty by construction."""
    required = 0
    for grp in ctx.qgroups:
        if grp.kind == "connected" and not ctx.empty_connected_ok:
            required |= 1 << grp.extra_offset()
    for grp in ctx.cgroups:
        if grp.kind in (EXISTS_ALL_EDGE, EXISTS_EXISTS_EDGE, EXISTS_VERTEX):
            required |= 1 << grp.extra_offset()
    best = None
    for bits, value, p in root_vector.iter_triples():
        if bits & required != required:
            continue
        if best is None or value < best[1]:
            best = (bits, value, p)
    return best


def extract_witness(ctx, prov_index):
    members = ctx.prov.walk_members(prov_index)
    witness = {name: [] for name in ctx.formula.membership_vars if not name.startswith("~")}
    for v, mask in sorted(members.items()):
        for name, i in ctx.member_index.items():
            if mask >> i & 1 and not name.startswith("~"):
                witness[name].append(v)
    return witness


def model_check(g, vntd, f, weights=None, empty_connected_ok=True, dedup=True,
                naive_join=False, track_witness=True, collect_states=False,
                deadline=None):
    """Run the checker over a prepared very nice decomposition."""
    weights = weights or WeightMap()
    weights.check(g.n)
    sign = -1 if f.objective == "maximize" else 1
    layout = compile_layout(f, max(vntd.k, 1))
    ctx = CheckerContext(f, layout, weights, sign,
                         empty_connected_ok=empty_connected_ok, dedup=dedup,
                         naive_join=naive_join, track_witness=track_witness,
                         collect_states=collect_states)
    diagnostics = []
    if any(c.shape == ALL_EXISTS_EDGE for c in f.clauses):
        isolated = g.isolated_vertices()
        if isolated:
            diagnostics.append(
                "isolated vertices cannot satisfy a 'forall x exists y edge' clause: "
                + ", ".join(str(v + 1) for v in isolated))
    sim = engine.simulate(vntd, checker_factory(ctx), deadline=deadline)
    best = accept(sim.root_vector, ctx)
    stats = sim.stats_dict()
    stats["width"] = vntd.width()
    if best is None:
        result = CheckResult(False, None, None, stats, diagnostics)
    else:
        value = ctx.sign * best[1] if f.objective != "decision" else None
        witness = extract_witness(ctx, best[2]) if track_witness else None
        result = CheckResult(True, value, witness, stats, diagnostics)
    result.context = ctx
    return result


def solve(g, f, td=None, weights=None, **kwargs):
    """Full pipeline: decompose (unless given), nicify, model-check."""
    if td is None:
        td = heuristic_decompose(g)
    vntd = make_very_nice(td, g)
    return model_check(g, vntd, f, weights=weights, **kwargs)
