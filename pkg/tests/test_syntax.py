import random

import pytest
from hypothesis import given, settings

from conftest import formulas, random_tree, trees
from treelogic.errors import ParseError
from treelogic.formula import Definition, ExistsNode, ForallNode, HasLabel, Implies, InSet
from treelogic.syntax import parse_formula, parse_theory, parse_tree, print_formula, print_theory, print_tree
from treelogic.tree import LabeledTree


def test_parse_theory_basic():
    th = parse_theory("label A; axiom ex x. A(x);")
    assert th.labels == ("A",)
    assert th.axioms == (ExistsNode("x", HasLabel("A", "x")),)


def test_parse_subset_definition():
    th = parse_theory("def Subset(X,Y) := all x. (X(x) -> Y(x));")
    assert th.definitions == (
        Definition("Subset", ("X", "Y"), ForallNode("x", Implies(InSet("X", "x"), InSet("Y", "x")))),)


@pytest.mark.parametrize("text,kind", [
    ("axiom all x, x;", "syntax"),
    ("label A; label A;", "redeclaration"),
    ("axiom ex x. Q(x);", "unknown-name"),
    ("label A; axiom ex x. A(x) $;", "lexical"),
    ("label A; axiom ex X. A(X);", "syntax"),
])
def test_parse_errors_carry_spans(text, kind):
    with pytest.raises(ParseError) as e:
        parse_theory(text)
    assert e.value.kind == kind
    sp = e.value.span
    assert 0 <= sp.start <= sp.end <= len(text)


def test_precedence_and_associativity():
    th = parse_theory("label A, B, C;")
    assert parse_formula("all x. A(x) -> B(x) -> C(x)", th) == parse_formula("all x. A(x) -> (B(x) -> C(x))", th)
    assert parse_formula("all x. !A(x) & B(x) | C(x)", th) == parse_formula("all x. ((!A(x)) & B(x)) | C(x)", th)
    assert parse_formula("all x. A(x) <-> B(x) -> C(x)", th) == parse_formula("all x. A(x) <-> (B(x) -> C(x))", th)


def test_comments_and_named_axioms():
    th = parse_theory("label A;  # a label\naxiom Some: ex x. A(x); # trailing\n")
    assert th.axiom_names == ("Some",)
    assert parse_theory(print_theory(th)) == th


def test_parse_tree_examples():
    t = parse_tree("({V2} ({H,SUBCAT5}) ({N2}) ({N2}))")
    assert t.nodes == ((), (0,), (1,), (2,))
    assert t.labels((0,)) == {"H", "SUBCAT5"}
    assert parse_tree("({})") == LabeledTree({(): []})
    c = parse_tree("({A}@c)")
    assert c.constants == {"c": ()} and c.labels(()) == {"A"}


def test_tree_errors():
    for bad in ["({A}", "({A}@c ({}@c))", "{A}", "({A} x)", "({A}) ({B})"]:
        with pytest.raises(ParseError):
            parse_tree(bad)


def test_print_tree_examples():
    assert print_tree(parse_tree("({})")) == "({})"
    text = "({V2} ({H,SUBCAT5}) ({N2}) ({N2}))"
    assert print_tree(parse_tree(text)) == text


def test_print_parse_canonicalizes():
    messy = "( { B , A }   ({})\n ({A}@k) )"
    once = print_tree(parse_tree(messy))
    assert once == "({A,B} ({}) ({A}@k))"
    assert print_tree(parse_tree(once)) == once


def test_fifty_node_round_trip():
    t = random_tree(random.Random(50), 50, 4, ("A", "B", "C"))
    assert len(t) == 50
    assert parse_tree(print_tree(t)) == t


@given(trees(max_nodes=20, k=4))
def test_tree_round_trip(t):
    assert parse_tree(print_tree(t)) == t


_THEORY = """
label A, B;
const c;
def Subset(X, Y) := all x. X(x) -> Y(x);
def Up(x, y) := idom(y, x) | x = y;
axiom ex! x. A(x);
axiom Named: All X. Ex Y. Subset(X, Y) & (all x. Y(x) <-> !(prec(x, c) | dom(c, x)));
axiom (all x. A(x)) <-> (ex x, y. Up(x, y) & !B(y));
"""


def test_theory_round_trip():
    th = parse_theory(_THEORY).check()
    text = print_theory(th)
    assert parse_theory(text) == th
    assert print_theory(parse_theory(text)) == text


@given(formulas(depth=5))
@settings(max_examples=200)
def test_formula_round_trip(phi):
    th = parse_theory("label A, B;")
    text = print_formula(phi)
    assert parse_formula(text, th) == phi
    assert print_formula(parse_formula(text, th)) == text
