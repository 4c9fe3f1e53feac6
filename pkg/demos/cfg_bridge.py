"""A context-free grammar, its theory, the compiled automaton and the trees they agree on.

Run with ``python3 demos/cfg_bridge.py``.
"""

from treelogic.automata import accepted_trees, is_empty
from treelogic.cfg import Grammar, cfg_to_theory, derivation_trees
from treelogic.checker import satisfies
from treelogic.compile import compile_theory
from treelogic.syntax import print_theory, print_tree

grammar = Grammar.parse("""
S -> NP VP
NP -> n
VP -> v | v NP
""")
theory = cfg_to_theory(grammar, 2)
print(print_theory(theory))

aut = compile_theory(theory, 2)
print(f"compiled automaton: {aut.n_states} states, {len(aut.delta)} transitions")
print("smallest derivation:", print_tree(is_empty(aut)))

derived = derivation_trees(grammar, 7)
accepted = accepted_trees(aut, 7)
print(f"derivations up to 7 nodes: {len(derived)}, accepted by the automaton: {len(accepted)}")
for t in accepted:
    assert satisfies(t, theory)
    print("  ", print_tree(t))
