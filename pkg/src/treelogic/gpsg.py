"""Feature specification defaults over ID-rule grammars.

Features are binary: a literal ``INV`` asks for the label, ``-INV`` for
its absence.  Given a set of ID rules, a literal's *Free* predicate holds
at nodes whose rule-inherited features are compatible with it, and its
*Privileged* predicate holds at nodes prohibited from taking it: the
nodes that are not Free plus everything linked to one of them through
the feature's *Propagate* relation.  A default for a literal then says
that every node not privileged with respect to it takes it.

Definition names are derived from literal names: ``Free_INV``,
``Free_not_INV``, ``PrivClosed_not_INV`` (the closed-set predicate),
``PrivSet_not_INV`` and ``Privileged_not_INV``.  ``Propagate_INV`` is
shared by both literals of a feature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import (
    Apply, Definition, Eq, ExistsNode, ExistsSet, ForallNode, ForallSet, Formula, HasLabel, Idom, Implies,
    InSet, Not, Prec, Theory, conj, disj, exists,
)


@dataclass(frozen=True, order=True)
class Literal:
    feature: str
    positive: bool = True

    @classmethod
    def parse(cls, text: str) -> "Literal":
        if text.startswith("-"):
            return cls(text[1:], False)
        return cls(text.lstrip("+"), True)

    def __str__(self):
        return self.feature if self.positive else "-" + self.feature

    def __neg__(self) -> "Literal":
        return Literal(self.feature, not self.positive)

    @property
    def name(self) -> str:
        """Identifier fragment used in definition names."""
        return self.feature if self.positive else "not_" + self.feature

    def at(self, x: str) -> Formula:
        atom = HasLabel(self.feature, x)
        return atom if self.positive else Not(atom)


def _literals(spec: Iterable) -> tuple:
    return tuple(l if isinstance(l, Literal) else Literal.parse(l) for l in spec)


@dataclass(frozen=True)
class IdRule:
    """An immediate-dominance rule; each category is a sequence of literals."""

    name: str
    mother: tuple
    daughters: tuple

    def __post_init__(self):
        object.__setattr__(self, "mother", _literals(self.mother))
        object.__setattr__(self, "daughters", tuple(_literals(d) for d in self.daughters))
        if not self.daughters:
            raise ValueError(f"rule {self.name!r} has no daughters")

    @property
    def arity(self) -> int:
        return len(self.daughters)

    def features(self) -> set:
        return {l.feature for cat in (self.mother,) + self.daughters for l in cat}


@dataclass(frozen=True)
class PropagationPattern:
    """Positions ``a`` and ``b`` of a local tree induced by ``rule``; 0 is the mother, ``i`` daughter ``i``."""

    rule: str
    a: int
    b: int

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a propagation pattern relates two distinct positions")


@dataclass(frozen=True)
class PropagationSpec:
    feature: str
    patterns: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(
            p if isinstance(p, PropagationPattern) else PropagationPattern(*p) for p in self.patterns))


@dataclass(frozen=True)
class DefaultSpec:
    literal: Literal
    guard: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.literal, Literal):
            object.__setattr__(self, "literal", Literal.parse(self.literal))
        object.__setattr__(self, "guard", _literals(self.guard))


# -- library definitions ---------------------------------------------------


def _ys(n: int) -> list:
    return [f"y{i}" for i in range(1, n + 1)]


def children_definition(n: int) -> Definition:
    """``Children<n>(x, y1..yn)``: the children of ``x`` are exactly ``y1 .. yn`` in order."""
    ys = _ys(n)
    parts = [Idom("x", y) for y in ys]
    parts += [Prec(a, b) for a, b in zip(ys, ys[1:])]
    parts.append(ForallNode("z", Implies(Idom("x", "z"), disj(*(Eq("z", y) for y in ys)))))
    return Definition(f"Children{n}", ["x"] + ys, conj(*parts))


SUBSET = Definition("Subset", ("X", "Y"), ForallNode("x", Implies(InSet("X", "x"), InSet("Y", "x"))))


def core_definitions(max_arity: int) -> list:
    return [children_definition(n) for n in range(1, max_arity + 1)] + [SUBSET]


def core_theory(max_arity: int = 3) -> Theory:
    return Theory(definitions=core_definitions(max_arity))


# -- rules, Free and Propagate -----------------------------------------------


def id_rule_to_definition(rule: IdRule) -> Definition:
    ys = _ys(rule.arity)
    parts = [Apply(f"Children{rule.arity}", ["x"] + ys)]
    parts += [l.at("x") for l in rule.mother]
    for y, cat in zip(ys, rule.daughters):
        parts += [l.at(y) for l in cat]
    return Definition(rule.name, ["x"] + ys, conj(*parts))


def _local_tree(rule: IdRule, bind: dict, avoid: set) -> Formula:
    """``ID_rule`` applied with the positions in ``bind`` fixed and the rest existentially bound."""
    args, fresh = [], []
    for pos in range(rule.arity + 1):
        if pos in bind:
            args.append(bind[pos])
        else:
            v = f"m{pos}" if pos == 0 else f"d{pos}"
            while v in avoid:
                v += "_"
            args.append(v)
            fresh.append(v)
    return exists(fresh, Apply(rule.name, args))


def licensed_definition(rules: Sequence[IdRule]) -> Definition:
    """``Licensed(x)``: ``x`` is the mother of a local tree induced by some rule."""
    return Definition("Licensed", ["x"], disj(*(_local_tree(r, {0: "x"}, {"x"}) for r in rules)))


def build_free(rules: Sequence[IdRule], literal: Literal | str) -> Definition:
    """``Free_<literal>(x)``, evaluated disjunctively over the rule positions that could license ``x``.

    Nodes in no daughter position (the root, daughters of unruled local
    trees) are free.
    """
    literal = literal if isinstance(literal, Literal) else Literal.parse(literal)
    clash = -literal
    positions = [(r, i) for r in rules for i in range(1, r.arity + 1)]
    ok = [(r, i) for r, i in positions if clash not in r.daughters[i - 1]]
    name = f"Free_{literal.name}"
    if len(ok) == len(positions):
        return Definition(name, ["x"], Eq("x", "x"))
    placed = lambda r, i: _local_tree(r, {i: "x"}, {"x"})
    anywhere = disj(*(placed(r, i) for r, i in positions))
    body = Not(anywhere)
    if ok:
        body = disj(body, *(placed(r, i) for r, i in ok))
    return Definition(name, ["x"], body)


def propagate_definition(spec: PropagationSpec, rules: Sequence[IdRule]) -> Definition:
    """``Propagate_<feature>(x, y)``, symmetric by construction."""
    by_name = {r.name: r for r in rules}
    parts = []
    for p in spec.patterns:
        rule = by_name[p.rule]
        parts.append(_local_tree(rule, {p.a: "x", p.b: "y"}, {"x", "y"}))
        parts.append(_local_tree(rule, {p.a: "y", p.b: "x"}, {"x", "y"}))
    body = disj(*parts) if parts else conj(Not(Eq("x", "x")), Eq("y", "y"))
    return Definition(f"Propagate_{spec.feature}", ["x", "y"], body)


# -- privilege ---------------------------------------------------------------


def _privilege(literal: Literal) -> list:
    n, f = literal.name, literal.feature
    closed = Definition(f"PrivClosed_{n}", ["X"], conj(
        ForallNode("x", Implies(Not(Apply(f"Free_{n}", ["x"])), InSet("X", "x"))),
        ForallNode("x", Implies(
            ExistsNode("y", conj(InSet("X", "y"), Apply(f"Propagate_{f}", ["x", "y"]))),
            InSet("X", "x"))),
    ))
    privset = Definition(f"PrivSet_{n}", ["X"], conj(
        Apply(closed.name, ["X"]),
        ForallSet("Y", Implies(Apply(closed.name, ["Y"]), Apply("Subset", ["X", "Y"]))),
    ))
    privileged = Definition(f"Privileged_{n}", ["x"],
                            ExistsSet("X", conj(Apply(privset.name, ["X"]), InSet("X", "x"))))
    return [closed, privset, privileged]


def emit_privilege(literal: Literal | str, prop: PropagationSpec | None = None,
                   rules: Sequence[IdRule] = (), dual: bool = True) -> list:
    """Closed-set, least-set and membership predicates for ``literal`` (and its dual).

    The emitted bodies refer to ``Free_*``, ``Propagate_<feature>`` and
    ``Subset`` by name; ``Propagate`` is included here when ``prop`` is
    given, the rest must come from elsewhere.
    """
    literal = literal if isinstance(literal, Literal) else Literal.parse(literal)
    out = []
    if prop is not None:
        out.append(propagate_definition(prop, rules))
    out += _privilege(literal)
    if dual:
        out += _privilege(-literal)
    return out


def privileged_universal(literal: Literal | str) -> Definition:
    """The alternative reading: members of every closed set."""
    literal = literal if isinstance(literal, Literal) else Literal.parse(literal)
    n = literal.name
    return Definition(f"PrivilegedAll_{n}", ["x"],
                      ForallSet("X", Implies(Apply(f"PrivClosed_{n}", ["X"]), InSet("X", "x"))))


def fsd_to_axiom(d: DefaultSpec) -> Formula:
    """``all x. (guard(x) & !Privileged_l(x)) -> l(x)``; without a guard just ``!Privileged_l(x) -> l(x)``."""
    unprivileged = Not(Apply(f"Privileged_{d.literal.name}", ["x"]))
    premise = conj(*(g.at("x") for g in d.guard), unprivileged)
    return ForallNode("x", Implies(premise, d.literal.at("x")))


def default_name(d: DefaultSpec) -> str:
    guard = "".join(f"{g.name}_" for g in d.guard)
    return f"FSD_{guard}{d.literal.name}"


# -- whole grammars ----------------------------------------------------------


def licensing_axiom() -> Formula:
    """Every node with a child heads a local tree induced by some rule."""
    return ForallNode("x", Implies(ExistsNode("y", Idom("x", "y")), Apply("Licensed", ["x"])))


def grammar_theory(labels: Sequence[str], rules: Sequence[IdRule], propagation: Sequence[PropagationSpec] = (),
                   defaults: Sequence[DefaultSpec] = (), extra_axioms=(), max_arity: int | None = None) -> Theory:
    """A theory licensing exactly the trees built from ``rules`` that respect ``defaults``.

    ``extra_axioms`` holds ``(name, formula)`` pairs appended after the
    licensing axiom and before the defaults.
    """
    max_arity = max_arity or max(r.arity for r in rules)
    defs = core_definitions(max_arity)
    defs += [id_rule_to_definition(r) for r in rules]
    defs.append(licensed_definition(rules))
    props = {p.feature: p for p in propagation}
    done = set()
    for d in defaults:
        f = d.literal.feature
        if f in done:
            continue
        done.add(f)
        prop = props.get(f, PropagationSpec(f))
        defs.append(build_free(rules, Literal(f, True)))
        defs.append(build_free(rules, Literal(f, False)))
        defs += emit_privilege(Literal(f, True), prop, rules)
    names = ["Licensing"] + [n for n, _ in extra_axioms] + [default_name(d) for d in defaults]
    axioms = [licensing_axiom()] + [a for _, a in extra_axioms] + [fsd_to_axiom(d) for d in defaults]
    return Theory(tuple(labels), (), tuple(defs), tuple(axioms), tuple(names)).check()


# -- the worked example --------------------------------------------------------

EXAMPLE_LABELS = ("S", "V2", "V1", "N2", "H", "SUBCAT5", "INV", "BAR0", "PAS")

EXAMPLE_RULES = (
    IdRule("ID5", ["V2"], [["H", "SUBCAT5"], ["N2"], ["N2"]]),
    IdRule("R_s", ["S"], [["N2"], ["V2"]]),
    IdRule("R_inv", ["S"], [["V2", "INV"], ["N2"]]),
    IdRule("R_vp", ["V2"], [["V1"], ["N2"]]),
    IdRule("R_vp2", ["V2"], [["N2"], ["V1"]]),
    IdRule("R_v1", ["V1"], [["H", "BAR0"]]),
    IdRule("R_pas", ["V1"], [["H", "BAR0", "PAS"], ["N2"]]),
)

EXAMPLE_PROPAGATION = (
    PropagationSpec("INV", [("ID5", 0, 1), ("R_vp", 0, 1), ("R_v1", 0, 1)]),
)

EXAMPLE_DEFAULTS = (
    DefaultSpec(Literal("INV", False)),
    DefaultSpec(Literal("PAS", False), ["BAR0"]),
)


def example_theory() -> Theory:
    """The [-INV] and BAR0 => -PAS defaults over a small verb-phrase grammar."""
    return grammar_theory(EXAMPLE_LABELS, EXAMPLE_RULES, EXAMPLE_PROPAGATION, EXAMPLE_DEFAULTS)
