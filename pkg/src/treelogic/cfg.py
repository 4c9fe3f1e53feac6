"""Context-free grammars as theories, and their derivation trees."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import GrammarError
from .formula import (
    Apply, Definition, Formula, ExistsNode, ForallNode, HasLabel, Idom, Implies, Not, Theory, conj, disj, exists,
)
from .gpsg import children_definition
from .tree import LabeledTree


@dataclass(frozen=True)
class Grammar:
    """``productions`` is a sequence of ``(lhs, rhs)`` with ``rhs`` a tuple of symbols."""

    nonterminals: tuple
    terminals: tuple
    start: str
    productions: tuple

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", tuple(self.nonterminals))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "productions", tuple((l, tuple(r)) for l, r in self.productions))
        symbols = self.nonterminals + self.terminals
        if len(set(symbols)) != len(symbols):
            raise GrammarError("a symbol is declared twice")
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")
        for lhs, rhs in self.productions:
            if lhs not in self.nonterminals:
                raise GrammarError(f"left-hand side {lhs!r} is not a nonterminal")
            for s in rhs:
                if s not in symbols:
                    raise GrammarError(f"undeclared symbol {s!r} in {lhs} -> {' '.join(rhs)}")

    @classmethod
    def parse(cls, text: str) -> "Grammar":
        """Read ``S -> A B | a`` lines; the first left-hand side is the start symbol.

        Symbols occurring on a left-hand side are nonterminals, the rest
        terminals; ``-> `` with nothing after it is an empty production.
        """
        prods = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            lhs, arrow, rhs = line.partition("->")
            if not arrow or len(lhs.split()) != 1:
                raise GrammarError(f"cannot read production {raw!r}")
            for alt in rhs.split("|"):
                prods.append((lhs.strip(), tuple(alt.split())))
        if not prods:
            raise GrammarError("no productions")
        nts = tuple(dict.fromkeys(l for l, _ in prods))
        ts = tuple(dict.fromkeys(s for _, r in prods for s in r if s not in nts))
        return cls(nts, ts, prods[0][0], prods)

    @property
    def symbols(self) -> tuple:
        return self.nonterminals + self.terminals

    @property
    def max_rhs(self) -> int:
        return max((len(r) for _, r in self.productions), default=0)


def _ys(n: int) -> list:
    return [f"y{i}" for i in range(1, n + 1)]


def cfg_to_theory(g: Grammar, k: int | None = None) -> Theory:
    """A theory whose models are exactly the derivation trees of ``g``.

    Every node carries exactly one symbol, the root the start symbol, and
    each internal node together with its children matches a production.
    Leaves are terminals or nonterminals with an empty production.
    """
    if k is not None and g.max_rhs > k:
        raise GrammarError(f"a right-hand side has {g.max_rhs} symbols, more than k={k}")
    arities = sorted({len(r) for _, r in g.productions if r})
    defs = [children_definition(n) for n in arities]
    names = []
    for i, (lhs, rhs) in enumerate(g.productions, 1):
        if not rhs:
            continue
        ys = _ys(len(rhs))
        body = conj(Apply(f"Children{len(rhs)}", ["x"] + ys), HasLabel(lhs, "x"),
                    *(HasLabel(s, y) for s, y in zip(rhs, ys)))
        defs.append(Definition(f"Prod{i}", ["x"] + ys, body))
        names.append((f"Prod{i}", len(rhs)))

    has_child = ExistsNode("y", Idom("x", "y"))
    axioms = [
        ("Root", ForallNode("x", Implies(Not(ExistsNode("y", Idom("y", "x"))), HasLabel(g.start, "x")))),
        ("OneSymbol", ForallNode("x", conj(
            disj(*(HasLabel(s, "x") for s in g.symbols)),
            *(Not(conj(HasLabel(a, "x"), HasLabel(b, "x"))) for a, b in itertools.combinations(g.symbols, 2)),
        ))),
    ]
    if names:
        axioms.append(("Productions", ForallNode("x", Implies(
            has_child, disj(*(exists(_ys(n), Apply(p, ["x"] + _ys(n))) for p, n in names)))))),
    else:
        axioms.append(("Productions", ForallNode("x", Not(has_child))))
    nullable = {l for l, r in g.productions if not r}
    must_branch = [n for n in g.nonterminals if n not in nullable]
    if must_branch:
        axioms.append(("Complete", ForallNode("x", Implies(
            disj(*(HasLabel(n, "x") for n in must_branch)), has_child))))
    if g.terminals:
        axioms.append(("TerminalLeaves", ForallNode("x", Implies(
            disj(*(HasLabel(t, "x") for t in g.terminals)), Not(has_child)))))
    return Theory(g.symbols, (), tuple(defs), tuple(a for _, a in axioms), tuple(n for n, _ in axioms)).check()


def derivation_trees(g: Grammar, max_nodes: int) -> list:
    """All derivation trees of ``g`` with at most ``max_nodes`` nodes, by direct expansion."""
    memo = {}

    def grow(sym: str, budget: int) -> list:
        """Pairs ``(size, nested)`` with ``nested = (symbol, children)``."""
        key = (sym, budget)
        if key in memo:
            return memo[key]
        out = []
        if budget >= 1:
            if sym in g.terminals:
                out.append((1, (sym, ())))
            for lhs, rhs in g.productions:
                if lhs == sym:
                    out += [(1 + n, (sym, kids)) for n, kids in _sequences(rhs, budget - 1)]
        memo[key] = out
        return out

    def _sequences(rhs, budget) -> Iterator[tuple]:
        if not rhs:
            yield 0, ()
            return
        for n, first in grow(rhs[0], budget - (len(rhs) - 1)):
            for m, rest in _sequences(rhs[1:], budget - n):
                yield n + m, (first,) + rest

    result = set()
    for _, nested in grow(g.start, max_nodes):
        labels = {}

        def place(node, addr):
            labels[addr] = {node[0]}
            for i, c in enumerate(node[1]):
                place(c, addr + (i,))

        place(nested, ())
        result.add(LabeledTree(labels))
    return sorted(result, key=lambda t: (len(t), t.nodes, [sorted(t.labels(a)) for a in t.nodes]))


def language(g: Grammar, k: int | None = None, max_nodes: int = 9, state_cap: int | None = None) -> list:
    """Derivation trees read off the compiled theory automaton (see :func:`derivation_trees` for the oracle)."""
    from .automata import DEFAULT_STATE_CAP, accepted_trees
    from .compile import compile_theory

    k = k or max(g.max_rhs, 1)
    aut = compile_theory(cfg_to_theory(g, k), k, state_cap or DEFAULT_STATE_CAP)
    return accepted_trees(aut, max_nodes)
