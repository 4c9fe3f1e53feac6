import pytest

from treelogic.automata import run
from treelogic.cfg import Grammar, cfg_to_theory, derivation_trees, language
from treelogic.checker import satisfies
from treelogic.compile import compile_theory
from treelogic.errors import GrammarError
from treelogic.syntax import parse_tree, print_tree
from treelogic.tree import enumerate_trees

S_AB = Grammar(("S",), ("A", "B"), "S", [("S", ("A", "B"))])
S_a = Grammar.parse("S -> a")
COMB = Grammar(("S",), ("A",), "S", [("S", ("A", "S")), ("S", ("A",))])


def models(g, max_nodes, k=2):
    th = cfg_to_theory(g, k)
    return [t for t in enumerate_trees(max_nodes, k, g.symbols) if satisfies(t, th).holds]


def test_s_to_ab_has_one_small_model():
    assert models(S_AB, 3) == [parse_tree("({S} ({A}) ({B}))")]


def test_s_to_a_unique_model():
    assert models(S_a, 4, k=1) == [parse_tree("({S} ({a}))")]


def test_comb_counts_match_derivations():
    got = models(COMB, 5)
    want = derivation_trees(COMB, 5)
    assert set(got) == set(want)
    assert [print_tree(t) for t in want] == ["({S} ({A}))", "({S} ({A}) ({S} ({A})))"]


def test_parse_grammar():
    g = Grammar.parse("""
        S -> NP VP   # sentence
        NP -> det n | n
        VP -> v NP | v
    """)
    assert g.start == "S"
    assert g.nonterminals == ("S", "NP", "VP")
    assert g.terminals == ("det", "n", "v")
    assert ("NP", ("n",)) in g.productions
    assert g.max_rhs == 2


def test_empty_productions():
    g = Grammar.parse("S -> a S |")
    assert ("S", ()) in g.productions
    trees = derivation_trees(g, 5)
    assert parse_tree("({S})") in trees
    assert set(trees) == set(models(g, 5))


@pytest.mark.parametrize("text", ["", "S A -> b", "S b"])
def test_grammar_errors(text):
    with pytest.raises(GrammarError):
        Grammar.parse(text)


def test_grammar_validation():
    with pytest.raises(GrammarError):
        Grammar(("S",), ("a",), "T", [("S", ("a",))])
    with pytest.raises(GrammarError):
        Grammar(("S",), ("a",), "S", [("S", ("b",))])
    with pytest.raises(GrammarError):
        Grammar(("S",), ("S",), "S", [])


def test_rhs_longer_than_k():
    g = Grammar.parse("S -> a a a")
    with pytest.raises(GrammarError):
        cfg_to_theory(g, 2)
    assert cfg_to_theory(g, 3).labels == ("S", "a")


def test_theory_shape():
    th = cfg_to_theory(Grammar.parse("S -> A B\nA -> a\nB -> b"))
    assert th.axiom_names == ("Root", "OneSymbol", "Productions", "Complete", "TerminalLeaves")
    assert {d.name for d in th.definitions} == {"Children1", "Children2", "Prod1", "Prod2", "Prod3"}


@pytest.mark.parametrize("text,n", [("S -> A B\nA -> a\nB -> b", 3), ("S -> S S | a", 5), ("S -> a S | b", 4)])
def test_satisfaction_is_derivability(text, n):
    g = Grammar.parse(text)
    th = cfg_to_theory(g, 2)
    derivations = set(derivation_trees(g, n))
    for t in enumerate_trees(n, 2, g.symbols):
        assert satisfies(t, th).holds == (t in derivations)


def test_language_via_automaton():
    g = Grammar.parse("S -> S S | a")
    assert language(g, 2, 7) == sorted(derivation_trees(g, 7), key=lambda t: (len(t), t.shape()))
    aut = compile_theory(cfg_to_theory(g, 2), 2)
    for t in derivation_trees(g, 9):
        assert run(aut, t)
