"""Tarskian evaluation of formulas on labeled trees.

Formulas are expanded and then translated once into a Python function over
bitmask tables of a tree: node variables hold preorder indices, set
variables hold integer bitmasks over those indices.  Quantified
subformulas that do not depend on some enclosing bound variable are
memoized per evaluation call, keyed by the values of their free variables.
The memo tables live only for one call, so evaluation stays pure.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import FormulaError, SubsetBudgetExceeded, UnboundVariable
from .formula import (
    And, Dom, Eq, ExistsNode, ExistsSet, ForallNode, ForallSet, Formula, HasLabel, Idom, Iff,
    Implies, InSet, Not, Or, Prec, Theory, SET, eliminate_constants, expand, free_vars, sort_of,
)
from .tree import LabeledTree

DEFAULT_NODE_BUDGET = 20


def default_node_budget() -> int:
    env = os.environ.get("TREELOGIC_NODE_BUDGET")
    return int(env) if env else DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class Valuation:
    """Assignment of node variables to addresses and set variables to address sets."""

    nodes: tuple = ()
    sets: tuple = ()

    @classmethod
    def of(cls, nodes: Mapping | None = None, sets: Mapping | None = None) -> "Valuation":
        return cls(tuple(sorted((k, tuple(v)) for k, v in (nodes or {}).items())),
                   tuple(sorted((k, frozenset(map(tuple, v))) for k, v in (sets or {}).items())))

    def node_map(self) -> dict:
        return dict(self.nodes)

    def set_map(self) -> dict:
        return dict(self.sets)

    def names(self) -> set:
        return {k for k, _ in self.nodes} | {k for k, _ in self.sets}

    def __str__(self):
        parts = [f"{k}={_addr(v)}" for k, v in self.nodes]
        parts += [f"{k}={{{', '.join(_addr(a) for a in sorted(v))}}}" for k, v in self.sets]
        return ", ".join(parts)


def _addr(a) -> str:
    return "e" if not a else ".".join(map(str, a))


# -- per-tree tables ------------------------------------------------------


@dataclass(frozen=True)
class Tables:
    n: int
    idom: tuple
    dom: tuple
    prec: tuple
    labels: dict
    nodes: tuple
    parent: tuple = ()
    anc: tuple = ()
    before: tuple = ()


@lru_cache(maxsize=4096)
def tables(tree: LabeledTree) -> Tables:
    nodes = tree.nodes
    n = len(nodes)
    index = {a: i for i, a in enumerate(nodes)}
    size = [1] * n
    for i in range(n - 1, 0, -1):
        size[index[nodes[i][:-1]]] += size[i]
    idom = [0] * n
    for i in range(1, n):
        idom[index[nodes[i][:-1]]] |= 1 << i
    full = (1 << n) - 1
    dom = tuple(((1 << (i + size[i])) - 1) ^ ((1 << i) - 1) for i in range(n))
    prec = tuple(full ^ ((1 << (i + size[i])) - 1) for i in range(n))
    labels = {}
    for i, ls in enumerate(tree.label_sets()):
        for l in ls:
            labels[l] = labels.get(l, 0) | 1 << i
    # converse relations, for quantifying over the first argument
    parent = [0] * n
    anc = [1] * n
    for i in range(1, n):
        p = index[nodes[i][:-1]]
        parent[i] = 1 << p
        anc[i] = anc[p] | 1 << i
    # in preorder, earlier nodes that are not ancestors precede
    before = tuple(((1 << i) - 1) & ~anc[i] for i in range(n))
    return Tables(n, tuple(idom), dom, prec, labels, nodes, tuple(parent), tuple(anc), before)


# -- code generation ------------------------------------------------------


class _Gen:
    def __init__(self, free: list):
        self.helpers = []
        self.labels = {}
        self.counter = itertools.count()
        self.has_sets = False
        self.free = free

    def label(self, name):
        if name not in self.labels:
            self.labels[name] = f"L{len(self.labels)}"
        return self.labels[name]

    def expr(self, f, env, enclosing):
        """``env`` maps formula names to Python names; ``enclosing`` lists bound names in scope."""
        if isinstance(f, Idom):
            return f"(idom[{env[f.left]}] >> {env[f.right]} & 1)"
        if isinstance(f, Dom):
            return f"(dom[{env[f.left]}] >> {env[f.right]} & 1)"
        if isinstance(f, Prec):
            return f"(prec[{env[f.left]}] >> {env[f.right]} & 1)"
        if isinstance(f, Eq):
            return f"({env[f.left]} == {env[f.right]})"
        if isinstance(f, HasLabel):
            return f"({self.label(f.label)} >> {env[f.var]} & 1)"
        if isinstance(f, InSet):
            return f"({env[f.setvar]} >> {env[f.var]} & 1)"
        if isinstance(f, Not):
            return f"(not {self.expr(f.body, env, enclosing)})"
        if isinstance(f, And):
            return f"({self.expr(f.left, env, enclosing)} and {self.expr(f.right, env, enclosing)})"
        if isinstance(f, Or):
            return f"({self.expr(f.left, env, enclosing)} or {self.expr(f.right, env, enclosing)})"
        if isinstance(f, Implies):
            return f"(not {self.expr(f.left, env, enclosing)} or {self.expr(f.right, env, enclosing)})"
        if isinstance(f, Iff):
            return f"(bool({self.expr(f.left, env, enclosing)}) == bool({self.expr(f.right, env, enclosing)}))"
        if isinstance(f, (ExistsNode, ForallNode, ExistsSet, ForallSet)):
            names = _names(f)
            if any(v not in names for v in enclosing):
                return self.memoized(f, env, names)
            return self.quantifier(f, env, enclosing)
        raise FormulaError(f"cannot evaluate unexpanded formula node {f!r}")

    def quantifier(self, f, env, enclosing):
        if isinstance(f, (ExistsNode, ForallNode)):
            mask = self.vector(f.body, f.var, env, enclosing + [f.var])
            if mask is not None:
                return f"({mask} != 0)" if isinstance(f, ExistsNode) else f"({mask} == full)"
        py = f"v{next(self.counter)}"
        inner = dict(env)
        inner[f.var] = py
        body = self.expr(f.body, inner, enclosing + [f.var])
        fn = "any" if isinstance(f, (ExistsNode, ExistsSet)) else "all"
        if isinstance(f, (ExistsSet, ForallSet)):
            self.has_sets = True
            rng = "range(nsets)"
        else:
            rng = "range(n)"
        return f"{fn}({body} for {py} in {rng})"

    def vector(self, f, x, env, enclosing):
        """Bitmask of the values of ``x`` satisfying ``f``, or None when ``f`` quantifies over something using ``x``."""
        if x not in _names(f):
            return f"(full if {self.expr(f, env, enclosing)} else 0)"
        if isinstance(f, HasLabel):
            return self.label(f.label)
        if isinstance(f, InSet):
            return env[f.setvar]
        if isinstance(f, (Idom, Dom, Prec, Eq)):
            if f.left == f.right:
                return "full" if isinstance(f, (Dom, Eq)) else "0"
            if isinstance(f, Eq):
                return f"(1 << {env[f.left if f.right == x else f.right]})"
            forward = {Idom: "idom", Dom: "dom", Prec: "prec"}[type(f)]
            converse = {Idom: "parent", Dom: "anc", Prec: "before"}[type(f)]
            if f.right == x:
                return f"{forward}[{env[f.left]}]"
            return f"{converse}[{env[f.right]}]"
        if isinstance(f, Not):
            body = self.vector(f.body, x, env, enclosing)
            return None if body is None else f"(full ^ {body})"
        if isinstance(f, (And, Or, Implies, Iff)):
            a, b = self.vector(f.left, x, env, enclosing), self.vector(f.right, x, env, enclosing)
            if a is None or b is None:
                return None
            if isinstance(f, And):
                return f"({a} & {b})"
            if isinstance(f, Or):
                return f"({a} | {b})"
            if isinstance(f, Implies):
                return f"((full ^ {a}) | {b})"
            return f"(full ^ ({a} ^ {b}))"
        return None

    def memoized(self, f, env, names):
        k = next(self.counter)
        args = sorted(names)
        params = [f"a{k}_{i}" for i in range(len(args))]
        local = {a: p for a, p in zip(args, params)}
        body = self.quantifier(f, local, list(args))
        key = f"({', '.join(params)},)" if params else "()"
        self.helpers.append(
            f"    M{k} = {{}}\n"
            f"    def m{k}({', '.join(params)}):\n"
            f"        key = {key}\n"
            f"        r = M{k}.get(key)\n"
            f"        if r is None:\n"
            f"            r = M{k}[key] = bool({body})\n"
            f"        return r\n"
        )
        return f"m{k}({', '.join(env[a] for a in args)})"


def _names(f) -> set:
    nodes, sets = free_vars(f)
    return nodes | sets


@dataclass(frozen=True)
class Compiled:
    """Expanded formula compiled to a Python evaluator; ``free`` fixes argument order."""

    formula: Formula
    free: tuple
    source: str
    uses_sets: bool
    builder: object

    def evaluate(self, tree: LabeledTree, args: Iterable = (), budget: int | None = None):
        return self.evaluator(tree, budget)(*args)

    def evaluator(self, tree: LabeledTree, budget: int | None = None):
        t = tables(tree)
        if self.uses_sets:
            budget = default_node_budget() if budget is None else budget
            if t.n > budget:
                raise SubsetBudgetExceeded(
                    f"set quantification over {t.n} nodes exceeds the node budget of {budget}")
        return self.builder(t.n, 1 << t.n, t.idom, t.dom, t.prec, t.labels, t.parent, t.anc, t.before)


@lru_cache(maxsize=2048)
def compile_expanded(phi: Formula) -> Compiled:
    """Compile an already expanded formula; free names become positional arguments (sorted)."""
    nodes, sets = free_vars(phi)
    free = tuple(sorted(nodes | sets))
    gen = _Gen(list(free))
    env = {v: f"f{i}" for i, v in enumerate(free)}
    main = gen.expr(phi, env, list(free))
    labels = "".join(f"    {py} = labels.get({name!r}, 0)\n" for name, py in gen.labels.items())
    src = (
        "def build(n, nsets, idom, dom, prec, labels, parent, anc, before):\n"
        "    full = (1 << n) - 1\n"
        + labels
        + "".join(gen.helpers)
        + f"    def main({', '.join(env[v] for v in free)}):\n"
        + f"        return bool({main})\n"
        + "    return main\n"
    )
    ns = {}
    exec(compile(src, "<treelogic formula>", "exec"), ns)
    return Compiled(phi, free, src, gen.has_sets, ns["build"])


@lru_cache(maxsize=2048)
def compile_formula(theory: Theory, phi: Formula) -> Compiled:
    return compile_expanded(expand(theory, phi))


# -- public operations ----------------------------------------------------


def _arguments(compiled: Compiled, tree: LabeledTree, v: Valuation | None, constants=()) -> list:
    nodes = v.node_map() if v else {}
    sets = v.set_map() if v else {}
    t = tables(tree)
    index = {a: i for i, a in enumerate(t.nodes)}
    out = []
    for name in compiled.free:
        if sort_of(name) == SET:
            if name not in sets:
                raise UnboundVariable(f"set variable {name!r} is unbound")
            mask = 0
            for a in sets[name]:
                if a not in index:
                    raise UnboundVariable(f"{name} contains {a}, outside the tree")
                mask |= 1 << index[a]
            out.append(mask)
        else:
            if name in nodes:
                a = tuple(nodes[name])
            elif name in tree.constants and name in constants:
                a = tree.constants[name]
            else:
                raise UnboundVariable(f"node name {name!r} is unbound")
            if a not in index:
                raise UnboundVariable(f"{name} bound to {a}, outside the tree")
            out.append(index[a])
    return out


def eval_formula(tree: LabeledTree, theory: Theory, phi: Formula, v: Valuation | None = None,
                 budget: int | None = None) -> bool:
    """Truth of ``phi`` in ``tree`` under ``v``.

    Defined predicates are expanded first.  Constants of ``theory`` not
    bound by ``v`` take their interpretation from ``tree.constants``.
    """
    c = compile_formula(theory, phi)
    return c.evaluate(tree, _arguments(c, tree, v, theory.constants), budget)


# ``eval`` is the name the rest of the package documents
eval = eval_formula


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`satisfies`; truthy iff every axiom holds."""

    holds: bool
    failed: int | None = None
    axiom_name: str | None = None
    formula: Formula | None = None

    def __bool__(self):
        return self.holds


@lru_cache(maxsize=256)
def _prepared_axioms(theory: Theory) -> tuple:
    flat = eliminate_constants(theory)
    return tuple(compile_formula(flat, a) for a in flat.axioms), flat


def satisfies(tree: LabeledTree, theory: Theory, budget: int | None = None) -> Verdict:
    """Check every axiom of ``theory`` (constants eliminated) on ``tree``.

    Stops at the first failing axiom and reports its position and name.
    """
    compiled, flat = _prepared_axioms(theory)
    for i, c in enumerate(compiled):
        if c.free:
            raise UnboundVariable(f"{flat.axiom_label(i)} has free names {c.free}")
        if not c.evaluate(tree, (), budget):
            return Verdict(False, i, flat.axiom_names[i], flat.axioms[i])
    return Verdict(True)


def find_assignments(tree: LabeledTree, theory: Theory, phi: Formula,
                     free: Iterable[str] | None = None, budget: int | None = None) -> list:
    """All valuations of ``free`` (default: the free variables of ``phi``) that make it true.

    Order: node variables before set variables, each group by name; nodes
    range in preorder, sets in increasing bitmask order over preorder.
    """
    c = compile_formula(theory, phi)
    if free is None:
        n, s = free_vars(phi, theory.constants)
        free = n | s
    names = sorted(free, key=lambda x: (sort_of(x) == SET, x))
    missing = set(c.free) - set(names) - set(theory.constants)
    if missing:
        raise UnboundVariable(f"free names {sorted(missing)} are not enumerated")
    t = tables(tree)
    if any(sort_of(v) == SET for v in names):
        limit = default_node_budget() if budget is None else budget
        if t.n > limit:
            raise SubsetBudgetExceeded(f"enumerating sets over {t.n} nodes exceeds budget {limit}")
    run = c.evaluator(tree, budget)
    pos = {name: i for i, name in enumerate(names)}
    consts = {k: t.nodes.index(a) for k, a in tree.constants.items() if k in theory.constants}
    ranges = [range(1 << t.n) if sort_of(v) == SET else range(t.n) for v in names]
    out = []
    for combo in itertools.product(*ranges):
        args = [combo[pos[f]] if f in pos else consts[f] for f in c.free]
        if run(*args):
            nodes = {v: t.nodes[x] for v, x in zip(names, combo) if sort_of(v) != SET}
            sets = {v: [t.nodes[i] for i in range(t.n) if x >> i & 1]
                    for v, x in zip(names, combo) if sort_of(v) == SET}
            out.append(Valuation.of(nodes, sets))
    return out


def mask_to_addresses(tree: LabeledTree, mask: int) -> frozenset:
    nodes = tables(tree).nodes
    return frozenset(nodes[i] for i in range(len(nodes)) if mask >> i & 1)
