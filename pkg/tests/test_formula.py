import math

import pytest

from conftest import builtin_formula
from tdmc.formula import (
    ALL_ALL_EDGE,
    ALL_EXISTS_EDGE,
    ALL_VERTEX,
    EXISTS_EXISTS_EDGE,
    FormulaError,
    Partition,
    compile_layout,
    parse_formula,
)


def test_parse_vertex_cover():
    f = parse_formula("free S;\nminimize;\nforall x forall y edge -> (S(x) | S(y));\n")
    assert f.free_vars() == ["S"]
    assert f.objective == "minimize"
    assert len(f.clauses) == 1
    assert f.clauses[0].shape == ALL_ALL_EDGE


def test_parse_partition_and_comments():
    f = parse_formula(
        "# proper coloring\npartition R, G, B;\n"
        "forall x forall y edge -> (!R(x) | !R(y)) & (!G(x) | !G(y)) & (!B(x) | !B(y));\n")
    assert isinstance(f.prefix[0], Partition)
    assert f.prefix[0].classes == ("R", "G", "B")
    assert len(f.clauses[0].cnf) == 3


def test_exists_desugars_to_partition():
    f = parse_formula("exists X;\nforall x (X(x));\n")
    part = f.prefix[0]
    assert isinstance(part, Partition)
    assert part.classes == ("X", "~X")
    assert part.desugared_from == "X"
    assert "X" in f.membership_vars and "~X" in f.membership_vars


def test_exists_clause_vs_decl():
    f = parse_formula("free S;\nexists x (S(x));\n")
    assert f.clauses[0].shape == "exists-vertex"
    f = parse_formula("free S;\nexists x exists y edge & (S(x)) & (S(y));\n")
    assert f.clauses[0].shape == EXISTS_EXISTS_EDGE


def test_guard_shape_enforced():
    with pytest.raises(FormulaError):
        parse_formula("free S;\nforall x forall y edge & (S(x));\n")
    with pytest.raises(FormulaError):
        parse_formula("free S;\nforall x exists y edge -> (S(x));\n")


def test_three_quantifiers_rejected():
    with pytest.raises(FormulaError):
        parse_formula("free S;\nforall x forall y forall z edge -> (S(x));\n")


def test_undeclared_variable_rejected():
    with pytest.raises(FormulaError):
        parse_formula("free S;\nforall x (T(x));\n")


def test_duplicate_declaration_rejected():
    with pytest.raises(FormulaError):
        parse_formula("free S;\nfree S;\nforall x (S(x));\n")


def test_objective_requires_free_var():
    with pytest.raises(FormulaError):
        parse_formula("exists X;\nminimize;\nforall x (X(x));\n")


def test_equality_atom():
    f = parse_formula("free S;\nforall x forall y edge -> (!x=y | S(x));\n")
    lit = f.clauses[0].cnf[0][0]
    assert lit.var == "=" and lit.negated
    with pytest.raises(FormulaError):
        parse_formula("free S;\nforall x (x=y);\n")


def test_builtins_parse():
    for name in ("3col", "vc", "ds", "is", "fvs", "triangle-minor"):
        f = builtin_formula(name)
        assert f.clauses


def log2ceil(x):
    return max(1, math.ceil(math.log2(x))) if x > 1 else 0


def test_layout_free_var():
    f = parse_formula("free S;\nforall x (S(x));\n")
    layout = compile_layout(f, 4)
    grp = layout.group_for("S")
    assert grp.symmetric and grp.slots == 4 and grp.slot_bits == 1
    assert layout.symmetric_bits == 4
    assert layout.asymmetric_bits == 0  # all-vertex clauses carry no state


def test_layout_partition():
    f = builtin_formula("3col")
    layout = compile_layout(f, 5)
    part = [g for g in layout.groups if g.kind == "partition"][0]
    assert part.slot_bits == log2ceil(3)
    assert layout.symmetric_bits == 5 * 2


def test_layout_connected_and_forest():
    f = parse_formula("connected C;\nforest F;\nforall x (C(x) | F(x) | !C(x));\n")
    layout = compile_layout(f, 6)
    c = layout.group_for("C")
    fg = layout.group_for("F")
    assert not c.symmetric and c.extra_bits == 1  # done-bit
    assert c.slot_bits == log2ceil(7)
    assert fg.extra_bits == 0
    assert layout.symmetric_bits == 0


def test_layout_clause_bits():
    f = parse_formula(
        "free S;\n"
        "forall x exists y edge & (S(y));\n"
        "exists x forall y edge -> (S(y));\n"
        "exists x exists y edge & (S(x));\n")
    layout = compile_layout(f, 3)
    by_kind = {g.kind: g for g in layout.groups if g.kind != "free"}
    assert by_kind[ALL_EXISTS_EDGE].bits == 3
    assert by_kind["exists-all-edge"].bits == 4
    assert by_kind[EXISTS_EXISTS_EDGE].bits == 1


def test_layout_symmetric_groups_first():
    f = builtin_formula("fvs")
    layout = compile_layout(f, 4)
    offsets = [(g.offset, g.symmetric) for g in sorted(layout.groups, key=lambda g: g.offset)]
    seen_asym = False
    for _, symmetric in offsets:
        if not symmetric:
            seen_asym = True
        else:
            assert not seen_asym  # symmetric groups occupy the low bits
