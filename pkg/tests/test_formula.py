import pytest
from hypothesis import given, settings, strategies as st

from treelogic.checker import Valuation, eval_formula, satisfies
from treelogic.errors import CyclicDefinition, FormulaError, SortMismatch, UndefinedPredicate
from treelogic.formula import (
    Apply, Definition, ExistsNode, ForallNode, HasLabel, Idom, Implies, InSet, Theory, eliminate_constants, expand,
    free_vars, is_expanded, nnf, substitute,
)
from treelogic.syntax import parse_formula, parse_theory
from treelogic.tree import enumerate_trees

SUBSET = Definition("Subset", ("X", "Y"), ForallNode("x", Implies(InSet("X", "x"), InSet("Y", "x"))))


def test_expand_subset():
    th = Theory(definitions=[SUBSET]).check()
    out = expand(th, Apply("Subset", ["X", "Y"]))
    assert out == ForallNode("x", Implies(InSet("X", "x"), InSet("Y", "x")))


def test_expand_unique_existence_is_semantically_the_standard_desugaring():
    th = parse_theory("label A;").check()
    out = expand(th, parse_formula("ex! x. A(x)", th))
    assert is_expanded(out)
    reference = parse_formula("ex x. A(x) & (all y. A(y) -> y = x)", th)
    for t in enumerate_trees(4, 2, ["A"]):
        assert eval_formula(t, th, out) == eval_formula(t, th, reference) == (
            sum("A" in t.labels(a) for a in t.nodes) == 1)


def test_cyclic_definitions_rejected():
    th = Theory(definitions=[Definition("D", ["x"], Apply("D", ["x"]))])
    with pytest.raises(CyclicDefinition):
        expand(th, Apply("D", ["x"]))
    with pytest.raises(CyclicDefinition):
        th.check()
    mutual = parse_theory("def P(x) := Q(x); def Q(x) := P(x);")
    with pytest.raises(CyclicDefinition):
        mutual.check()


def test_undefined_and_sort_errors():
    th = parse_theory("label A; def S(X) := ex x. X(x);").check()
    with pytest.raises(UndefinedPredicate):
        expand(th, Apply("Nope", ["x"]))
    with pytest.raises(SortMismatch):
        Theory(("A",), (), th.definitions, (ExistsNode("x", Apply("S", ["x"])),)).check()
    with pytest.raises(FormulaError):
        Theory(("A",), (), th.definitions, (Apply("S", ["X", "Y"]),)).check()


def test_expansion_avoids_capture():
    th = parse_theory("label A; def P(x) := ex y. idom(x, y) & A(y);").check()
    # the argument y must not be captured by the body's own y
    out = expand(th, parse_formula("P(y)", th))
    assert free_vars(out) == ({"y"}, set())
    t_yes = enumerate_trees(3, 2, ["A"])
    for t in t_yes:
        for a in t.nodes:
            expected = any("A" in t.labels(c) for c in t.children(a))
            assert eval_formula(t, th, out, Valuation.of({"y": a})) == expected


def test_substitute_renames_bound_variables():
    phi = ExistsNode("y", Idom("x", "y"))
    out = substitute(phi, {"x": "y"})
    assert free_vars(out) == ({"y"}, set())
    assert isinstance(out, ExistsNode) and out.var != "y"


def test_free_vars_examples():
    assert free_vars(ForallNode("x", InSet("X", "x"))) == (set(), {"X"})
    assert free_vars(Idom("x", "y")) == ({"x", "y"}, set())
    assert free_vars(ExistsNode("x", Idom("x", "y"))) == ({"y"}, set())


def test_eliminate_constants_identity_without_constants():
    th = parse_theory("label A; axiom ex x. A(x);").check()
    assert eliminate_constants(th) == th


def test_eliminate_constants_single():
    th = parse_theory("label A; const c; axiom A(c);").check()
    out = eliminate_constants(th)
    assert out.constants == ()
    assert out.axioms == (ExistsNode("c", HasLabel("A", "c")),)


def test_eliminate_constants_shares_the_witness():
    th = parse_theory("label A, B; const c; axiom A(c); axiom B(c);").check()
    out = eliminate_constants(th)
    assert len(out.axioms) == 1
    shared = parse_theory("label A, B; axiom ex x. A(x) & B(x);").check()
    separate = parse_theory("label A, B; axiom ex x. A(x); axiom ex x. B(x);").check()
    differs = False
    for t in enumerate_trees(3, 2, ["A", "B"]):
        got = satisfies(t, out).holds
        assert got == satisfies(t, shared).holds
        differs |= got != satisfies(t, separate).holds
    assert differs


def test_eliminate_constants_models_match_some_interpretation():
    th = parse_theory("label A, B; const c, d; axiom A(c) & idom(c, d); axiom B(d) | c = d;").check()
    flat = eliminate_constants(th)
    for t in enumerate_trees(3, 2, ["A", "B"]):
        some = any(
            satisfies(type(t)(dict(zip(t.nodes, t.label_sets())), {"c": a, "d": b}), th).holds
            for a in t.nodes for b in t.nodes)
        assert satisfies(t, flat).holds == some


_FORMULAS = [
    "ex x. A(x) & !(ex y. idom(x, y))",
    "all x. P(x) -> B(x)",
    "Ex X. (all x. X(x) -> A(x)) & (ex x. X(x))",
    "ex! x. P(x)",
    "all x, y. prec(x, y) -> !(P(x) & P(y))",
]


@given(st.sampled_from(_FORMULAS))
@settings(max_examples=20, deadline=None)
def test_expand_is_idempotent_and_preserves_truth(text):
    th = parse_theory("label A, B; def P(x) := A(x) & (ex y. dom(x, y) & B(y));").check()
    phi = parse_formula(text, th)
    once = expand(th, phi)
    assert expand(th, once) == once
    for t in enumerate_trees(4, 2, ["A", "B"]):
        assert eval_formula(t, th, phi) == eval_formula(t, th, once) == eval_formula(t, th, nnf(once))
