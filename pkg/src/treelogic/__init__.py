"""Monadic second-order logic on finite labeled trees."""

from .automata import TreeAutomaton, accepted_trees, equivalent, is_empty, run
from .cfg import Grammar, cfg_to_theory, derivation_trees
from .checker import Valuation, Verdict, eval_formula, find_assignments, satisfies
from .compile import compile_formula, compile_theory
from .errors import (
    BudgetExceeded, FormulaError, ParseError, PartitionViolation, StateCapExceeded, SubsetBudgetExceeded,
    TreeLogicError,
)
from .formula import Definition, Theory, eliminate_constants, expand
from .syntax import parse_formula, parse_theory, parse_tree, print_formula, print_theory, print_tree
from .tree import LabeledTree, count_trees, enumerate_trees

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "Definition", "FormulaError", "Grammar", "LabeledTree", "ParseError", "PartitionViolation",
    "StateCapExceeded", "SubsetBudgetExceeded", "Theory", "TreeAutomaton", "TreeLogicError", "Valuation", "Verdict",
    "accepted_trees", "cfg_to_theory", "compile_formula", "compile_theory", "count_trees", "derivation_trees",
    "eliminate_constants", "enumerate_trees", "equivalent", "eval_formula", "expand", "find_assignments",
    "is_empty", "parse_formula", "parse_theory", "parse_tree", "print_formula", "print_theory", "print_tree", "run",
    "satisfies",
]
