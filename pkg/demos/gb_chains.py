"""Movement chains in the GB fragment, and the overlap count that separates context-free cases.

Run with ``python3 demos/gb_chains.py``.
"""

from treelogic import _corpus
from treelogic.errors import PartitionViolation
from treelogic.gb import ENGLISH, chain_report, gb_theory
from treelogic.checker import satisfies
from treelogic.syntax import parse_tree

theory = gb_theory(ENGLISH)
for name in _corpus.GB_TREES:
    tree = parse_tree(_corpus.read(name))
    verdict = satisfies(tree, theory)
    print(f"== {name}: {'well-formed' if verdict.holds else 'fails ' + verdict.axiom_name}")
    try:
        report = chain_report(tree, ENGLISH, theory)
    except PartitionViolation as e:
        print("   no chain partition:", e)
        continue
    for chain, kind in report.nontrivial:
        print(f"   {kind} chain over {sorted(chain)}")
    print(f"   max_overlap {report.max_overlap}")
