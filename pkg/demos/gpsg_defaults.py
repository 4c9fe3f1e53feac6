"""Feature defaults in action: which trees the [-INV] and BAR0 => -PAS defaults let through.

Run with ``python3 demos/gpsg_defaults.py``.
"""

from treelogic import _corpus
from treelogic.checker import Valuation, eval_formula, satisfies
from treelogic.formula import Apply
from treelogic.gpsg import example_theory
from treelogic.syntax import parse_tree, print_formula

theory = example_theory()
print("Free_not_INV expands to", print_formula(theory.definition("Free_not_INV").body))
print()

for name in _corpus.GPSG_TREES:
    tree = parse_tree(_corpus.read(name))
    verdict = satisfies(tree, theory)
    status = "accepted" if verdict.holds else f"rejected by {verdict.axiom_name}"
    print(f"{name:28} {status}")

# INV on the verb is fine in the inverted clause: every node on the path is privileged.
tree = parse_tree(_corpus.read("gpsg_inv_chain.tree"))
privileged = [a for a in tree.nodes
              if eval_formula(tree, theory, Apply("Privileged_not_INV", ["x"]), Valuation.of({"x": a}))]
print()
print("nodes privileged for -INV in gpsg_inv_chain:", privileged)
