"""Compilation of closed formulas to bottom-up tree automata.

Every intermediate automaton is complete and deterministic over only the
bits its subformula mentions: the labels it tests and its free variables.
Node variables are set variables constrained to singletons: every
intermediate automaton is intersected with the singleton constraint of
its free node variables, so it rejects malformed valuations and its
minimal form does not track them.  Atomic automata are hand-built and
correct on singleton valuations.

- negation flips the final states,
- binary connectives are synchronous products with the matching
  acceptance condition (cylindrifying to the union of the bits),
- existential quantification erases the variable's bit and determinizes,
- universal quantification is the dual of existential quantification.

Each intermediate result is minimized, which keeps the subset
constructions behind nested quantifiers small.
"""

from __future__ import annotations

from .automata import (
    DEFAULT_STATE_CAP, RankedAlphabet, TreeAutomaton, combine, complement, cylindrify, from_step,
    minimize, project_determinize,
)
from .errors import FormulaError, TreeLogicError
from .formula import (
    And, Dom, Eq, ExistsNode, ExistsSet, ForallNode, ForallSet, Formula, HasLabel, Idom, Iff, Implies,
    InSet, Not, Or, Prec, Theory, conj, eliminate_constants, exists, expand, free_vars,
    NODE, sort_of,
)

_VAR = "$"  # prefix keeping variable bits apart from label bits while compiling


def _alphabet(labels, variables, k) -> RankedAlphabet:
    return RankedAlphabet(tuple(sorted(labels)), tuple(sorted(variables)), k)


class _Compiler:
    def __init__(self, k: int, state_cap: int):
        self.k = k
        self.cap = state_cap
        self.cache = {}
        self.valid_cache = {}

    def atom(self, bits: list, step, final) -> TreeAutomaton:
        labels = [b for b in bits if not b.startswith(_VAR)]
        variables = [b for b in bits if b.startswith(_VAR)]
        al = _alphabet(labels, variables, self.k)
        pos = [al.bits.index(b) for b in bits]

        def wrapped(m, kids):
            return step(tuple(m >> p & 1 for p in pos), kids)

        return from_step(al, wrapped, final, self.cap)

    def valid(self, names: tuple) -> TreeAutomaton:
        """Each of the node variables ``names`` marks exactly one node."""
        hit = self.valid_cache.get(names)
        if hit is None:
            n = len(names)

            def step(b, kids):
                counts = tuple(min(2, b[i] + sum(k[i] for k in kids)) for i in range(n))
                return (2,) * n if 2 in counts else counts

            hit = self.valid_cache[names] = self.atom(list(names), step, lambda q: q == (1,) * n)
        return hit

    def compile(self, phi: Formula) -> TreeAutomaton:
        hit = self.cache.get(phi)
        if hit is None:
            hit = self.cache[phi] = minimize(self.restrict(self._compile(phi)))
        return hit

    def restrict(self, aut: TreeAutomaton) -> TreeAutomaton:
        """Intersect with the well-formed valuations of the free node variables."""
        nodes = tuple(v for v in aut.alphabet.variables if sort_of(v[len(_VAR):]) == NODE)
        if not nodes:
            return aut
        return combine(aut, self.valid(nodes), lambda x, y: x and y, self.cap, aut.alphabet)

    def _compile(self, phi: Formula) -> TreeAutomaton:
        V = _VAR
        if isinstance(phi, (Idom, Dom, Prec, Eq)) and phi.left == phi.right:
            holds = isinstance(phi, (Dom, Eq))
            return self.atom([V + phi.left], lambda b, kids: 0, lambda q: holds)
        if isinstance(phi, Eq):
            return self.atom([V + phi.left, V + phi.right],
                             lambda b, kids: int(any(kids) or (b[0] and b[1])), lambda q: q == 1)
        if isinstance(phi, (HasLabel, InSet)):
            other = phi.label if isinstance(phi, HasLabel) else V + phi.setvar
            return self.atom([V + phi.var, other],
                             lambda b, kids: int(any(kids) or (b[0] and b[1])), lambda q: q == 1)
        if isinstance(phi, Dom):
            return self.atom([V + phi.left, V + phi.right], _dom_step, lambda q: q == 2)
        if isinstance(phi, Idom):
            return self.atom([V + phi.left, V + phi.right], _idom_step, lambda q: q == 2)
        if isinstance(phi, Prec):
            return self.atom([V + phi.left, V + phi.right], _prec_step, lambda q: q == "done")
        if isinstance(phi, Not):
            return complement(self.compile(phi.body), self.cap)
        if isinstance(phi, (And, Or, Implies, Iff)):
            a, b = self.compile(phi.left), self.compile(phi.right)
            al = _alphabet(set(a.alphabet.labels) | set(b.alphabet.labels),
                           set(a.alphabet.variables) | set(b.alphabet.variables), self.k)
            return combine(a, b, _ACCEPT[type(phi)], self.cap, al)
        if isinstance(phi, (ExistsNode, ForallNode)):
            local = _local(phi.body, phi.var)
            if local is not None:
                return self.local_quantifier(local, isinstance(phi, ForallNode))
        if isinstance(phi, (ExistsNode, ExistsSet)):
            return self.exists(phi.var, self.compile(phi.body))
        if isinstance(phi, (ForallNode, ForallSet)):
            inner = minimize(self.restrict(complement(self.compile(phi.body), self.cap)))
            return complement(self.exists(phi.var, inner), self.cap)
        raise FormulaError(f"cannot compile {type(phi).__name__}; expand the formula first")

    def local_quantifier(self, local, universal: bool) -> TreeAutomaton:
        """Two-state automaton for a quantifier whose body only reads the labels of its variable."""
        labels, test = local
        seen = not universal

        def step(b, kids):
            hit = test(dict(zip(labels, b))) == seen
            return int(hit or any(kids))

        return self.atom(list(labels), step, lambda q: q == int(seen))

    def exists(self, var: str, body: TreeAutomaton) -> TreeAutomaton:
        bit = _VAR + var
        if bit not in body.alphabet.variables:
            # the variable is not free; domains are nonempty
            return body
        return project_determinize(body, bit, self.cap)


def _local(phi: Formula, x: str):
    """``(labels, test)`` when ``phi`` is quantifier-free and only reads labels of ``x``, else None."""
    labels = []

    def build(f):
        if isinstance(f, (Idom, Dom, Prec, Eq)):
            if f.left != x or f.right != x:
                return None
            holds = isinstance(f, (Dom, Eq))
            return lambda env: holds
        if isinstance(f, HasLabel):
            if f.var != x:
                return None
            if f.label not in labels:
                labels.append(f.label)
            return lambda env: env[f.label]
        if isinstance(f, Not):
            body = build(f.body)
            return None if body is None else (lambda env: not body(env))
        if isinstance(f, (And, Or, Implies, Iff)):
            left, right = build(f.left), build(f.right)
            if left is None or right is None:
                return None
            op = _ACCEPT[type(f)]
            return lambda env: op(left(env), right(env))
        return None

    test = build(phi)
    return None if test is None else (tuple(labels), test)


_ACCEPT = {
    And: lambda x, y: x and y,
    Or: lambda x, y: x or y,
    Implies: lambda x, y: (not x) or y,
    Iff: lambda x, y: x == y,
}


def _dom_step(b, kids):
    bx, by = b
    if 2 in kids:
        return 2
    below = by or 1 in kids
    if bx and below:
        return 2
    return 1 if below else 0


def _idom_step(b, kids):
    bx, by = b
    if 2 in kids or (bx and 1 in kids):
        return 2
    return 1 if by else 0


def _prec_step(b, kids):
    bx, by = b
    if "done" in kids:
        return "done"
    if "fail" in kids:
        return "fail"
    hx = bx or "x" in kids
    hy = by or "y" in kids
    if bx or by:
        return "fail" if hx and hy else ("x" if hx else "y")
    if hx and hy:
        return "done" if kids.index("x") < kids.index("y") else "fail"
    return "x" if hx else ("y" if hy else 0)


def compile_closed(phi: Formula, k: int, labels=(), state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Compile an expanded closed formula; the result reads exactly ``labels`` (plus any it tests)."""
    if k < 1:
        raise TreeLogicError("max branching k must be at least 1")
    nodes, sets = free_vars(phi)
    if nodes or sets:
        raise FormulaError(f"formula has free names {sorted(nodes | sets)}")
    aut = _Compiler(k, state_cap).compile(phi)
    al = RankedAlphabet(tuple(labels) + tuple(l for l in sorted(aut.alphabet.labels) if l not in labels), (), k)
    return minimize(cylindrify(aut, al, state_cap))


def compile_open(phi: Formula, k: int, labels=(), state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Compile an expanded formula whose free names become variable bits.

    The automaton accepts a tree under a valuation iff every free node
    variable marks exactly one node and the formula holds; use
    :func:`run` with a ``Valuation`` to evaluate it.
    """
    if k < 1:
        raise TreeLogicError("max branching k must be at least 1")
    aut = _Compiler(k, state_cap).compile(phi)
    inner = aut.alphabet
    al = RankedAlphabet(tuple(labels) + tuple(l for l in sorted(inner.labels) if l not in labels),
                        inner.variables, k)
    aut = minimize(cylindrify(aut, al, state_cap))
    names = RankedAlphabet(aut.alphabet.labels, tuple(v[len(_VAR):] for v in aut.alphabet.variables), k)
    return TreeAutomaton(names, aut.n_states, aut.finals, aut.delta)


def compile_formula(theory: Theory, phi: Formula, k: int, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Automaton accepting exactly the trees of branching <= ``k`` over ``theory.labels`` satisfying ``phi``."""
    flat = eliminate_constants(theory)
    if theory.constants:
        # constants read as existentially bound variables
        phi = exists(sorted(set(theory.constants) & free_vars(phi)[0]), phi)
    return compile_closed(expand(flat, phi), k, theory.labels, state_cap)


def compile_theory(theory: Theory, k: int, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Automaton for the conjunction of the theory's axioms (constants eliminated)."""
    flat = eliminate_constants(theory)
    if not flat.axioms:
        return compile_closed(_true(), k, theory.labels, state_cap)
    return compile_closed(expand(flat, conj(*flat.axioms)), k, theory.labels, state_cap)


def _true() -> Formula:
    return ForallNode("x", Eq("x", "x"))


compile = compile_formula
