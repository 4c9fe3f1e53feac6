"""Exception hierarchy shared by every treelogic module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into the source plus 1-based line/column of ``start``."""

    start: int
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")

    def __str__(self):
        return f"{self.line}:{self.column}"


class TreeLogicError(Exception):
    """Base class for all errors raised by this package."""


class AddressNotInDomain(TreeLogicError):
    pass


class FormulaError(TreeLogicError):
    """Ill-formed formula or theory: unknown names, sort or arity mismatches."""


class UndefinedPredicate(FormulaError):
    pass


class SortMismatch(FormulaError):
    pass


class CyclicDefinition(FormulaError):
    pass


class UnboundVariable(FormulaError):
    pass


class ParseError(TreeLogicError):
    """Lexical, syntactic or name-resolution error in surface syntax.

    ``kind`` is one of ``lexical``, ``syntax``, ``redeclaration``,
    ``unknown-name`` or ``duplicate-constant``.
    """

    def __init__(self, kind: str, message: str, span: SourceSpan):
        super().__init__(f"{span}: {kind} error: {message}")
        self.kind = kind
        self.message = message
        self.span = span


class BudgetExceeded(TreeLogicError):
    """A configured resource budget was hit; the computation was abandoned."""


class SubsetBudgetExceeded(BudgetExceeded):
    pass


class StateCapExceeded(BudgetExceeded):
    pass


class AlphabetMismatch(TreeLogicError):
    pass


class BranchingExceeded(TreeLogicError):
    pass


class UnknownLabel(TreeLogicError):
    pass


class GrammarError(TreeLogicError):
    pass


class PartitionViolation(TreeLogicError):
    """Chains found in a tree do not partition its nodes."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node
