"""Formula front-end: concrete syntax, AST, validation, and bit layouts.

The language has a quantifier prefix (``partition``/``connected``/``forest``/
``free``/``exists`` declarations plus an optional ``minimize``/``maximize``
directive) followed by clauses of six fixed shapes whose matrices are given
in CNF.  See the README for the full grammar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class FormulaError(ValueError):
    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


# Quantifier prefix entries.
@dataclass(frozen=True)
class FreeVar:
    name: str


@dataclass(frozen=True)
class Partition:
    classes: tuple
    desugared_from: str = None  # set when this came from a plain `exists X`


@dataclass(frozen=True)
class Connected:
    name: str


@dataclass(frozen=True)
class Forest:
    name: str


# Clause shapes.
ALL_ALL_EDGE = "all-all-edge"
ALL_EXISTS_EDGE = "all-exists-edge"
EXISTS_ALL_EDGE = "exists-all-edge"
EXISTS_EXISTS_EDGE = "exists-exists-edge"
ALL_VERTEX = "all-vertex"
EXISTS_VERTEX = "exists-vertex"

TWO_VAR_SHAPES = (ALL_ALL_EDGE, ALL_EXISTS_EDGE, EXISTS_ALL_EDGE, EXISTS_EXISTS_EDGE)


@dataclass(frozen=True)
class Literal:
    negated: bool
    var: str  # a set-variable name, or "=" for the x=y atom
    arg: str  # "x" or "y" ("xy" for the equality atom)


@dataclass(frozen=True)
class Clause:
    shape: str
    cnf: tuple  # tuple of disjunctions, each a tuple of Literals


@dataclass
class Formula:
    prefix: list
    clauses: list
    objective: str = "decision"  # decision | minimize | maximize
    source: str = ""
    membership_vars: list = field(default_factory=list)

    def free_vars(self):
        return [e.name for e in self.prefix if isinstance(e, FreeVar)]

    def var_names(self):
        """All names an atom may reference (partition classes included)."""
        names = []
        for e in self.prefix:
            if isinstance(e, Partition):
                names.extend(e.classes)
            else:
                names.append(e.name)
        return names


_KEYWORDS = {
    "partition", "connected", "forest", "free", "exists", "forall",
    "minimize", "maximize", "edge", "x", "y",
}
_SYMBOLS = ("->", ",", ";", "(", ")", "|", "&", "!", "=")


def _tokenize(text):
    tokens = []
    line = 1
    col = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        matched = None
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                matched = sym
                break
        if matched:
            tokens.append((matched, line, col))
            i += len(matched)
            col += len(matched)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise FormulaError(f"unexpected character {ch!r}", line, col)
    tokens.append((None, line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, want):
        tok, line, col = self.next()
        if tok != want:
            raise FormulaError(f"expected {want!r}, found {tok!r}", line, col)
        return tok

    def name(self):
        tok, line, col = self.next()
        if tok is None or tok in _KEYWORDS or not (tok[0].isalpha() or tok[0] == "_"):
            raise FormulaError(f"expected a variable name, found {tok!r}", line, col)
        return tok

    def parse(self):
        prefix = []
        objective = "decision"
        while True:
            tok = self.peek()
            if tok == "partition":
                self.next()
                classes = [self.name()]
                while self.peek() == ",":
                    self.next()
                    classes.append(self.name())
                self.expect(";")
                prefix.append(Partition(tuple(classes)))
            elif tok == "connected":
                self.next()
                prefix.append(Connected(self.name()))
                self.expect(";")
            elif tok == "forest":
                self.next()
                prefix.append(Forest(self.name()))
                self.expect(";")
            elif tok == "free":
                self.next()
                prefix.append(FreeVar(self.name()))
                self.expect(";")
            elif tok == "exists" and self._exists_is_decl():
                self.next()
                name = self.name()
                prefix.append(Partition((name, "~" + name), desugared_from=name))
                self.expect(";")
            elif tok in ("minimize", "maximize"):
                _, line, col = self.next()
                if objective != "decision":
                    raise FormulaError("duplicate objective directive", line, col)
                objective = tok
                self.expect(";")
            else:
                break
        clauses = []
        while self.peek() is not None:
            clauses.append(self.clause())
        return Formula(prefix, clauses, objective)

    def _exists_is_decl(self):
        # `exists x ...` starts a clause; `exists X;` declares a set variable.
        nxt = self.tokens[self.pos + 1][0]
        return nxt not in ("x", "y")

    def clause(self):
        tok, line, col = self.next()
        if tok not in ("forall", "exists"):
            raise FormulaError(f"expected a clause, found {tok!r}", line, col)
        q1 = tok
        v1, vline, vcol = self.next()
        if v1 != "x":
            raise FormulaError(f"the first bound variable must be 'x', found {v1!r}", vline, vcol)
        if self.peek() in ("forall", "exists"):
            q2 = self.next()[0]
            v2, vline, vcol = self.next()
            if v2 != "y":
                raise FormulaError(f"the second bound variable must be 'y', found {v2!r}", vline, vcol)
            if self.peek() in ("forall", "exists"):
                _, line3, col3 = self.next()
                raise FormulaError("clause shape not in the fragment (at most two bound variables)", line3, col3)
            self.expect("edge")
            guard = "->" if q2 == "forall" else "&"
            self.expect(guard)
            cnf = self.cnf(two_vars=True)
            shape = {
                ("forall", "forall"): ALL_ALL_EDGE,
                ("forall", "exists"): ALL_EXISTS_EDGE,
                ("exists", "forall"): EXISTS_ALL_EDGE,
                ("exists", "exists"): EXISTS_EXISTS_EDGE,
            }[(q1, q2)]
            self.expect(";")
            return Clause(shape, cnf)
        cnf = self.cnf(two_vars=False)
        self.expect(";")
        return Clause(ALL_VERTEX if q1 == "forall" else EXISTS_VERTEX, cnf)

    def cnf(self, two_vars):
        disjunctions = [self.disjunction(two_vars)]
        while self.peek() == "&":
            self.next()
            disjunctions.append(self.disjunction(two_vars))
        return tuple(disjunctions)

    def disjunction(self, two_vars):
        self.expect("(")
        lits = [self.literal(two_vars)]
        while self.peek() == "|":
            self.next()
            lits.append(self.literal(two_vars))
        self.expect(")")
        return tuple(lits)

    def literal(self, two_vars):
        negated = False
        if self.peek() == "!":
            self.next()
            negated = True
        tok, line, col = self.next()
        if tok == "x":
            self.expect("=")
            tok2, l2, c2 = self.next()
            if tok2 != "y":
                raise FormulaError("equality atoms must be of the form x=y", l2, c2)
            if not two_vars:
                raise FormulaError("x=y is not available in single-variable clauses", line, col)
            return Literal(negated, "=", "xy")
        if tok is None or tok in _KEYWORDS:
            raise FormulaError(f"expected an atom, found {tok!r}", line, col)
        self.expect("(")
        arg, aline, acol = self.next()
        if arg not in ("x", "y"):
            raise FormulaError(f"atom argument must be x or y, found {arg!r}", aline, acol)
        if arg == "y" and not two_vars:
            raise FormulaError("y is not bound in single-variable clauses", aline, acol)
        self.expect(")")
        return Literal(negated, tok, arg)


def parse_formula(text):
    """Parse and validate a formula document; plain ``exists`` is desugared."""
    f = _Parser(text).parse()
    f.source = text
    return validate_fragment(f)


def validate_fragment(f):
    """Check the Formula invariants; returns the formula on success."""
    names = f.var_names()
    seen = set()
    for name in names:
        if name in seen:
            raise FormulaError(f"variable {name!r} declared twice")
        seen.add(name)
    for c in f.clauses:
        if c.shape not in TWO_VAR_SHAPES + (ALL_VERTEX, EXISTS_VERTEX):
            raise FormulaError(f"unknown clause shape {c.shape!r}")
        for disj in c.cnf:
            for lit in disj:
                if lit.var == "=":
                    continue
                if lit.var not in seen:
                    raise FormulaError(f"atom references undeclared variable {lit.var!r}")
    if f.objective != "decision" and not f.free_vars():
        raise FormulaError(f"{f.objective} requires at least one free variable")
    f.membership_vars = _membership_vars(f)
    return f


def _membership_vars(f):
    """Names carrying a membership bit in witnesses, in declaration order."""
    out = []
    for e in f.prefix:
        if isinstance(e, Partition):
            out.extend(e.classes)
        else:
            out.append(e.name)
    return out


# ---------------------------------------------------------------------------
# Bit layout


@dataclass
class Group:
    kind: str  # free | partition | connected | forest | clause shape
    name: str  # variable name or clause tag
    symmetric: bool
    offset: int = 0
    slots: int = 0  # per-slot groups: one slot per tree-index
    slot_bits: int = 0
    domain: int = 0  # number of values a slot may hold
    extra_bits: int = 0  # trailing scalar bits (done-bit, found-bit, exists-bit)
    ref: object = None  # prefix entry or Clause

    @property
    def bits(self):
        return self.slots * self.slot_bits + self.extra_bits

    def slot_offset(self, i):
        return self.offset + i * self.slot_bits

    def slot_mask(self, i):
        return ((1 << self.slot_bits) - 1) << self.slot_offset(i)

    def extra_offset(self, j=0):
        return self.offset + self.slots * self.slot_bits + j

    def slot_value(self, bits, i):
        return (bits >> self.slot_offset(i)) & ((1 << self.slot_bits) - 1)

    def group_mask(self):
        return ((1 << self.bits) - 1) << self.offset


@dataclass
class StateLayout:
    k: int
    groups: list
    symmetric_bits: int = 0
    asymmetric_bits: int = 0

    @property
    def total_bits(self):
        return self.symmetric_bits + self.asymmetric_bits

    @property
    def sym_mask(self):
        return (1 << self.symmetric_bits) - 1

    def group_for(self, name):
        for grp in self.groups:
            if grp.name == name:
                return grp
        raise KeyError(name)

    def to_dict(self):
        return {
            "k": self.k,
            "symmetric_bits": self.symmetric_bits,
            "asymmetric_bits": self.asymmetric_bits,
            "groups": [
                {
                    "kind": grp.kind,
                    "name": grp.name,
                    "symmetric": grp.symmetric,
                    "offset": grp.offset,
                    "slots": grp.slots,
                    "slot_bits": grp.slot_bits,
                    "domain": grp.domain,
                    "extra_bits": grp.extra_bits,
                    "bits": grp.bits,
                }
                for grp in self.groups
            ],
        }


def _ceil_log2(x):
    return max(1, math.ceil(math.log2(x))) if x > 1 else 0


def compile_layout(f, k):
    """Assign bit offsets for every prefix entry and clause at bag size ``k``.

    Symmetric groups (free variables and partitions) are laid out first so
    the symmetric join key is a plain low-bit mask.  Connected and forest
    slots hold a component id in 1..k with 0 meaning "not in the set", hence
    ``ceil(log2(k+1))`` bits per slot.
    """
    if k < 1:
        raise ValueError("bag size must be at least 1")
    groups = []
    for e in f.prefix:
        if isinstance(e, FreeVar):
            groups.append(Group("free", e.name, True, slots=k, slot_bits=1, domain=2, ref=e))
        elif isinstance(e, Partition):
            q = len(e.classes)
            groups.append(Group("partition", "|".join(e.classes), True,
                                slots=k, slot_bits=_ceil_log2(q), domain=q, ref=e))
        elif isinstance(e, Connected):
            groups.append(Group("connected", e.name, False,
                                slots=k, slot_bits=_ceil_log2(k + 1), domain=k + 1,
                                extra_bits=1, ref=e))
        elif isinstance(e, Forest):
            groups.append(Group("forest", e.name, False,
                                slots=k, slot_bits=_ceil_log2(k + 1), domain=k + 1, ref=e))
        else:
            raise FormulaError(f"unknown prefix entry {e!r}")
    for i, c in enumerate(f.clauses):
        tag = f"clause{i}:{c.shape}"
        if c.shape == ALL_ALL_EDGE or c.shape == ALL_VERTEX:
            groups.append(Group(c.shape, tag, False, ref=c))
        elif c.shape == ALL_EXISTS_EDGE:
            groups.append(Group(c.shape, tag, False, slots=k, slot_bits=1, domain=2, ref=c))
        elif c.shape == EXISTS_ALL_EDGE:
            groups.append(Group(c.shape, tag, False, slots=k, slot_bits=1, domain=2,
                                extra_bits=1, ref=c))
        elif c.shape == EXISTS_EXISTS_EDGE or c.shape == EXISTS_VERTEX:
            groups.append(Group(c.shape, tag, False, extra_bits=1, ref=c))
        else:
            raise FormulaError(f"unknown clause shape {c.shape!r}")
    offset = 0
    ordered = [grp for grp in groups if grp.symmetric] + [grp for grp in groups if not grp.symmetric]
    sym_bits = 0
    for grp in ordered:
        grp.offset = offset
        offset += grp.bits
        if grp.symmetric:
            sym_bits += grp.bits
    layout = StateLayout(k, groups, symmetric_bits=sym_bits, asymmetric_bits=offset - sym_bits)
    return layout
