"""Formula syntax trees, theories, and definition expansion.

Variables are plain strings whose first character fixes their sort:
lowercase names range over nodes, uppercase names over sets of nodes.
Individual constants are lowercase names declared by a theory; they occupy
node positions and are treated as free node names until eliminated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import CyclicDefinition, FormulaError, SortMismatch, UndefinedPredicate

NODE = "node"
SET = "set"


def sort_of(name: str) -> str:
    return SET if name[:1].isupper() else NODE


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self):
        from .syntax import print_formula

        return print_formula(self)

    # operator sugar used heavily by the emitters
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)


# -- atoms -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Idom(Formula):
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class Dom(Formula):
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class Prec(Formula):
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    left: str
    right: str


RELATION_ATOMS = {"idom": Idom, "dom": Dom, "prec": Prec, "eq": Eq}


@dataclass(frozen=True, slots=True)
class HasLabel(Formula):
    label: str
    var: str


@dataclass(frozen=True, slots=True)
class InSet(Formula):
    setvar: str
    var: str


# -- connectives -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


BINARY = (And, Or, Implies, Iff)

# -- quantifiers -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ExistsNode(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ForallNode(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ForallSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsUniqueNode(Formula):
    var: str
    body: Formula


QUANTIFIERS = (ExistsNode, ForallNode, ExistsSet, ForallSet, ExistsUniqueNode)
NODE_QUANTIFIERS = (ExistsNode, ForallNode, ExistsUniqueNode)


@dataclass(frozen=True, slots=True)
class Apply(Formula):
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


ATOMS = (Idom, Dom, Prec, Eq, HasLabel, InSet)


# -- builders --------------------------------------------------------------


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction; ``conj()`` is not allowed."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def exists(vars: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vars)):
        body = (ExistsSet if sort_of(v) == SET else ExistsNode)(v, body)
    return body


def forall(vars: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vars)):
        body = (ForallSet if sort_of(v) == SET else ForallNode)(v, body)
    return body


def true_at(x: str) -> Formula:
    """A tautology mentioning ``x`` (the syntax has no truth constants)."""
    return Eq(x, x)


def false_formula() -> Formula:
    return ExistsNode("x", Not(Eq("x", "x")))


# -- theories --------------------------------------------------------------


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple
    body: Formula

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def sorts(self) -> tuple:
        return tuple(sort_of(p) for p in self.params)


@dataclass(frozen=True)
class Theory:
    labels: tuple = ()
    constants: tuple = ()
    definitions: tuple = ()
    axioms: tuple = ()
    axiom_names: tuple = field(default=())

    def __post_init__(self):
        for name in ("labels", "constants", "definitions", "axioms", "axiom_names"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.axiom_names:
            object.__setattr__(self, "axiom_names", (None,) * len(self.axioms))
        if len(self.axiom_names) != len(self.axioms):
            raise FormulaError("axiom_names must align with axioms")

    @cached_property
    def defs(self) -> dict:
        return {d.name: d for d in self.definitions}

    def definition(self, name: str) -> Definition:
        try:
            return self.defs[name]
        except KeyError:
            raise UndefinedPredicate(f"undefined predicate {name!r}") from None

    def axiom_label(self, i: int) -> str:
        """Human-readable reference for the ``i``-th (0-based) axiom."""
        name = self.axiom_names[i]
        return f"axiom {i + 1}" + (f" ({name})" if name else "")

    def replace(self, **changes) -> "Theory":
        fields = dict(labels=self.labels, constants=self.constants, definitions=self.definitions,
                      axioms=self.axioms, axiom_names=self.axiom_names)
        if "axioms" in changes and "axiom_names" not in changes:
            changes["axiom_names"] = ()
        fields.update(changes)
        return Theory(**fields)

    def extend(self, labels=(), constants=(), definitions=(), axioms=(), axiom_names=()) -> "Theory":
        """Append declarations, skipping labels and definitions already present verbatim."""
        axioms = tuple(axioms)
        labs = self.labels + tuple(l for l in dict.fromkeys(labels) if l not in self.labels)
        defs = list(self.definitions)
        for d in definitions:
            if d.name in self.defs:
                if self.defs[d.name] != d:
                    raise FormulaError(f"conflicting definitions of {d.name!r}")
                continue
            defs.append(d)
        names = tuple(axiom_names) or (None,) * len(axioms)
        return Theory(labs, self.constants + tuple(constants), tuple(defs),
                      self.axioms + axioms, self.axiom_names + names)

    def check(self) -> "Theory":
        """Validate names, sorts, closedness and acyclicity; return self."""
        seen = {}
        for kind, names in (("label", self.labels), ("constant", self.constants),
                            ("definition", [d.name for d in self.definitions])):
            for n in names:
                if n in seen:
                    raise FormulaError(f"{n!r} declared as both {seen[n]} and {kind}")
                seen[n] = kind
        for c in self.constants:
            if sort_of(c) != NODE:
                raise SortMismatch(f"constant {c!r} must be lowercase")
        for d in self.definitions:
            if len(set(d.params)) != len(d.params):
                raise FormulaError(f"repeated parameter in {d.name!r}")
            check_formula(self, d.body, free_ok=set(d.params))
        _definition_order(self)
        for f in self.axioms:
            check_formula(self, f, free_ok=set())
        return self


def check_formula(theory: Theory, phi: Formula, free_ok: set = frozenset()) -> None:
    """Sort-check ``phi`` against ``theory``; free names must be in ``free_ok`` or be constants."""
    labels = set(theory.labels)
    consts = set(theory.constants)

    def node_term(v, bound):
        if sort_of(v) != NODE:
            raise SortMismatch(f"{v!r} used where a node is expected")
        if v not in bound and v not in free_ok and v not in consts:
            raise FormulaError(f"unbound node name {v!r}")

    def walk(f, bound):
        if isinstance(f, (Idom, Dom, Prec, Eq)):
            node_term(f.left, bound)
            node_term(f.right, bound)
        elif isinstance(f, HasLabel):
            if f.label not in labels:
                raise UndefinedPredicate(f"undeclared label {f.label!r}")
            node_term(f.var, bound)
        elif isinstance(f, InSet):
            if sort_of(f.setvar) != SET:
                raise SortMismatch(f"{f.setvar!r} used as a set variable")
            if f.setvar not in bound and f.setvar not in free_ok:
                raise FormulaError(f"unbound set variable {f.setvar!r}")
            node_term(f.var, bound)
        elif isinstance(f, Not):
            walk(f.body, bound)
        elif isinstance(f, BINARY):
            walk(f.left, bound)
            walk(f.right, bound)
        elif isinstance(f, QUANTIFIERS):
            want = SET if isinstance(f, (ExistsSet, ForallSet)) else NODE
            if sort_of(f.var) != want:
                raise SortMismatch(f"quantified variable {f.var!r} has the wrong sort")
            walk(f.body, bound | {f.var})
        elif isinstance(f, Apply):
            d = theory.definition(f.name)
            if len(f.args) != len(d.params):
                raise SortMismatch(f"{f.name} expects {len(d.params)} arguments, got {len(f.args)}")
            for a, s in zip(f.args, d.sorts):
                if sort_of(a) != s:
                    raise SortMismatch(f"argument {a!r} of {f.name} should be a {s} name")
                if s == NODE:
                    node_term(a, bound)
                elif a not in bound and a not in free_ok:
                    raise FormulaError(f"unbound set variable {a!r}")
        else:
            raise FormulaError(f"not a formula: {f!r}")

    walk(phi, set())


# -- free variables and substitution --------------------------------------


def free_vars(phi: Formula, constants: Iterable[str] = ()) -> tuple:
    """Return ``(node_vars, set_vars)`` occurring free in ``phi``.

    Names listed in ``constants`` are not variables and are left out.
    """
    names = _free_names(phi) - set(constants)
    return ({n for n in names if sort_of(n) == NODE}, {n for n in names if sort_of(n) == SET})


def _free_names(phi: Formula) -> set:
    if isinstance(phi, (Idom, Dom, Prec, Eq)):
        return {phi.left, phi.right}
    if isinstance(phi, HasLabel):
        return {phi.var}
    if isinstance(phi, InSet):
        return {phi.setvar, phi.var}
    if isinstance(phi, Not):
        return _free_names(phi.body)
    if isinstance(phi, BINARY):
        return _free_names(phi.left) | _free_names(phi.right)
    if isinstance(phi, QUANTIFIERS):
        return _free_names(phi.body) - {phi.var}
    if isinstance(phi, Apply):
        return set(phi.args)
    raise FormulaError(f"not a formula: {phi!r}")


def all_names(phi: Formula) -> set:
    """Every variable name occurring in ``phi``, free or bound."""
    if isinstance(phi, QUANTIFIERS):
        return all_names(phi.body) | {phi.var}
    if isinstance(phi, Not):
        return all_names(phi.body)
    if isinstance(phi, BINARY):
        return all_names(phi.left) | all_names(phi.right)
    return _free_names(phi)


def fresh_name(base: str, avoid: set) -> str:
    stem = base.rstrip("0123456789_") or base
    for i in itertools.count(1):
        cand = f"{stem}_{i}"
        if cand not in avoid:
            return cand


def substitute(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Capture-avoiding renaming of free variables (sorts must agree)."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return phi
    return _subst(phi, mapping, set(mapping.values()) | set(mapping) | all_names(phi))


def _subst(phi, m, avoid):
    if not m:
        return phi
    r = lambda n: m.get(n, n)
    if isinstance(phi, (Idom, Dom, Prec, Eq)):
        return type(phi)(r(phi.left), r(phi.right))
    if isinstance(phi, HasLabel):
        return HasLabel(phi.label, r(phi.var))
    if isinstance(phi, InSet):
        return InSet(r(phi.setvar), r(phi.var))
    if isinstance(phi, Not):
        return Not(_subst(phi.body, m, avoid))
    if isinstance(phi, BINARY):
        return type(phi)(_subst(phi.left, m, avoid), _subst(phi.right, m, avoid))
    if isinstance(phi, Apply):
        return Apply(phi.name, tuple(r(a) for a in phi.args))
    if isinstance(phi, QUANTIFIERS):
        v = phi.var
        inner = {k: val for k, val in m.items() if k != v}
        free = _free_names(phi.body)
        inner = {k: val for k, val in inner.items() if k in free}
        if not inner:
            return phi
        if v in inner.values():
            nv = fresh_name(v, avoid)
            avoid.add(nv)
            inner[v] = nv
            return type(phi)(nv, _subst(phi.body, inner, avoid))
        return type(phi)(v, _subst(phi.body, inner, avoid))
    raise FormulaError(f"not a formula: {phi!r}")


# -- expansion -------------------------------------------------------------


def _definition_order(theory: Theory) -> list:
    """Definitions in dependency order; raises on cycles or undefined references."""
    order, state = [], {}

    def visit(name, path):
        st = state.get(name)
        if st == "done":
            return
        if st == "active":
            cycle = path[path.index(name):] + [name]
            raise CyclicDefinition("cyclic definition: " + " -> ".join(cycle))
        state[name] = "active"
        for dep in sorted(_applied_names(theory.definition(name).body)):
            visit(dep, path + [name])
        state[name] = "done"
        order.append(name)

    for d in theory.definitions:
        visit(d.name, [])
    return order


def _applied_names(phi: Formula) -> set:
    if isinstance(phi, Apply):
        return {phi.name}
    if isinstance(phi, Not) or isinstance(phi, QUANTIFIERS):
        return _applied_names(phi.body)
    if isinstance(phi, BINARY):
        return _applied_names(phi.left) | _applied_names(phi.right)
    return set()


_expanded_bodies: dict = {}


def _expanded_definitions(theory: Theory) -> dict:
    key = id(theory)
    hit = _expanded_bodies.get(key)
    if hit is not None and hit[0] is theory:
        return hit[1]
    bodies = {}
    for name in _definition_order(theory):
        d = theory.definition(name)
        bodies[name] = _expand(d.body, theory, bodies)
    if len(_expanded_bodies) > 64:
        _expanded_bodies.clear()
    _expanded_bodies[key] = (theory, bodies)
    return bodies


def expand(theory: Theory, phi: Formula) -> Formula:
    """Inline every defined predicate and desugar unique existence.

    The result contains no :class:`Apply` and no :class:`ExistsUniqueNode`.
    Bound variables are renamed where substitution would capture.
    """
    names = _applied_names(phi)
    if names:
        for n in names:
            theory.definition(n)
        bodies = _expanded_definitions(theory)
    else:
        bodies = {}
    return _expand(phi, theory, bodies)


def _expand(phi, theory, bodies):
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, Not):
        return Not(_expand(phi.body, theory, bodies))
    if isinstance(phi, BINARY):
        return type(phi)(_expand(phi.left, theory, bodies), _expand(phi.right, theory, bodies))
    if isinstance(phi, ExistsUniqueNode):
        body = _expand(phi.body, theory, bodies)
        x = phi.var
        y = fresh_name(x, all_names(body) | {x})
        return ExistsNode(x, And(body, ForallNode(y, Implies(substitute(body, {x: y}), Eq(y, x)))))
    if isinstance(phi, QUANTIFIERS):
        return type(phi)(phi.var, _expand(phi.body, theory, bodies))
    if isinstance(phi, Apply):
        d = theory.definition(phi.name)
        if len(phi.args) != len(d.params):
            raise SortMismatch(f"{phi.name} expects {len(d.params)} arguments, got {len(phi.args)}")
        for a, s in zip(phi.args, d.sorts):
            if sort_of(a) != s:
                raise SortMismatch(f"argument {a!r} of {phi.name} should be a {s} name")
        if phi.name not in bodies:
            raise CyclicDefinition(f"definition {phi.name!r} is not expandable")
        return substitute(bodies[phi.name], dict(zip(d.params, phi.args)))
    raise FormulaError(f"not a formula: {phi!r}")


def is_expanded(phi: Formula) -> bool:
    if isinstance(phi, (Apply, ExistsUniqueNode)):
        return False
    if isinstance(phi, ATOMS):
        return True
    if isinstance(phi, Not) or isinstance(phi, QUANTIFIERS):
        return is_expanded(phi.body)
    return is_expanded(phi.left) and is_expanded(phi.right)


# -- constants -------------------------------------------------------------


def eliminate_constants(theory: Theory) -> Theory:
    """Replace constants by existentially bound variables.

    Axioms mentioning no constant are kept as they are.  The remaining
    axioms are conjoined under one block of existential quantifiers (one
    shared witness per constant), placed where the first of them stood.
    """
    if not theory.constants:
        return theory
    consts = set(theory.constants)
    mentioning = [i for i, a in enumerate(theory.axioms) if _free_names(a) & consts]
    axioms, names = [], []
    for i, (a, n) in enumerate(zip(theory.axioms, theory.axiom_names)):
        if i not in mentioning:
            axioms.append(a)
            names.append(n)
        elif i == mentioning[0]:
            # a constant's own (lowercase) name serves as its variable: every
            # free occurrence of it is a constant occurrence, inner binders shadow
            body = conj(*(theory.axioms[j] for j in mentioning))
            used = [c for c in theory.constants if c in _free_names(body)]
            axioms.append(exists(used, body))
            joined = [theory.axiom_names[j] for j in mentioning if theory.axiom_names[j]]
            names.append("+".join(joined) if joined else None)
    return Theory(theory.labels, (), theory.definitions, tuple(axioms), tuple(names))


# -- normal forms ----------------------------------------------------------

_DUAL = {ExistsNode: ForallNode, ForallNode: ExistsNode, ExistsSet: ForallSet, ForallSet: ExistsSet}


def nnf(phi: Formula) -> Formula:
    """Negation normal form over ``!``, ``&``, ``|`` and the four quantifiers.

    Defined predicates and unique existence are treated as opaque atoms;
    expand first to push negation through them.
    """
    return _nnf(phi, False)


def _nnf(phi, neg):
    if isinstance(phi, ATOMS) or isinstance(phi, (Apply, ExistsUniqueNode)):
        return Not(phi) if neg else phi
    if isinstance(phi, Not):
        return _nnf(phi.body, not neg)
    if isinstance(phi, And):
        return (Or if neg else And)(_nnf(phi.left, neg), _nnf(phi.right, neg))
    if isinstance(phi, Or):
        return (And if neg else Or)(_nnf(phi.left, neg), _nnf(phi.right, neg))
    if isinstance(phi, Implies):
        return _nnf(Or(Not(phi.left), phi.right), neg)
    if isinstance(phi, Iff):
        a, b = phi.left, phi.right
        return _nnf(Or(And(a, b), And(Not(a), Not(b))), neg)
    if isinstance(phi, tuple(_DUAL)):
        q = _DUAL[type(phi)] if neg else type(phi)
        return q(phi.var, _nnf(phi.body, neg))
    raise FormulaError(f"not a formula: {phi!r}")


def size(phi: Formula) -> int:
    if isinstance(phi, (Not,) + QUANTIFIERS):
        return 1 + size(phi.body)
    if isinstance(phi, BINARY):
        return 1 + size(phi.left) + size(phi.right)
    return 1
