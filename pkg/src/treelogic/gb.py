"""Movement chains: antecedent government, the Link relation and Chain(X).

Positions, barriers, trace markers and chain endpoints are node labels
named by a :class:`GbConfig`.  Every trace carries the marker of its
link type, and a link runs from an antecedent ``x`` down to the trace
``y`` it licenses.  Nodes in no link form trivial chains by themselves.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from .checker import Valuation, eval_formula, find_assignments
from .errors import PartitionViolation, UnknownLabel
from .formula import (
    Apply, Definition, Dom, Eq, ExistsNode, ExistsSet, ExistsUniqueNode, ForallNode, Formula, HasLabel, Iff, Idom,
    Implies, InSet, Not, Or, Prec, Theory, conj, disj,
)
from .tree import LabeledTree

LINK_TYPES = ("A", "Abar", "AbarRef", "X0", "Right")
LINK_DEFS = {"A": "ALink", "Abar": "AbarLink", "AbarRef": "AbarRefLink", "X0": "X0Link", "Right": "RightLink"}


@dataclass(frozen=True)
class GbConfig:
    apos: str = "APos"
    spec: str = "Spec"
    barrier: str = "Barrier"
    target: str = "TargetPos"
    base: str = "BasePos"
    head: str = "Head"
    rightward: str = "Rightward"
    features: tuple = ()
    traces: dict = field(default_factory=lambda: {
        "A": "TrA", "Abar": "TrAbar", "AbarRef": "TrRef", "X0": "TrX0", "Right": "TrRight"})
    ref_prefix: str = "Ref"
    ref_bound: int = 4
    links: tuple = LINK_TYPES
    categories: tuple = ()

    def __post_init__(self):
        if set(self.links) - set(LINK_TYPES) or not self.links:
            raise ValueError(f"link types must be a nonempty subset of {LINK_TYPES}")
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "links", tuple(t for t in LINK_TYPES if t in self.links))
        object.__setattr__(self, "categories", tuple(self.categories))
        if self.target == self.base:
            raise ValueError("target and base markers must be distinct labels")
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"configuration reuses a label name: {labels}")

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    @property
    def ref_labels(self) -> tuple:
        return tuple(f"{self.ref_prefix}{i}" for i in range(1, self.ref_bound + 1)) if "AbarRef" in self.links else ()

    @property
    def labels(self) -> tuple:
        out = [self.apos, self.spec, self.barrier, self.target, self.base]
        if "X0" in self.links:
            out.append(self.head)
        if "Right" in self.links:
            out.append(self.rightward)
        out += self.features
        out += [self.traces[t] for t in self.links]
        out += self.ref_labels
        out += self.categories
        return tuple(out)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["features"] = list(self.features)
        d["links"] = list(self.links)
        d["categories"] = list(self.categories)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GbConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("configuration must be a JSON object")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown configuration fields {sorted(unknown)}")
        if "traces" in data:
            data["traces"] = {**cls().traces, **data["traces"]}
        return cls(**data)


def _check_declared(cfg: GbConfig, theory: Theory | None):
    if theory is None:
        return
    missing = [l for l in cfg.labels if l not in theory.labels]
    if missing:
        raise UnknownLabel(f"configuration labels not declared in the theory: {missing}")


# -- core notions --------------------------------------------------------------


def _no_barrier() -> Formula:
    return Not(ExistsNode("z", Apply("InterveningBarrier", ["z", "x", "y"])))


def _minimal(licensor: Formula) -> Formula:
    """No closer potential antecedent ``z`` (``licensor`` mentions ``z``)."""
    return Not(ExistsNode("z", conj(licensor, Apply("CCommands", ["z", "x"]), Apply("Intervenes", ["z", "x", "y"]))))


def emit_gb_core(cfg: GbConfig, theory: Theory | None = None) -> list:
    """C-command, intervention, barriers, feature agreement and Abar antecedent government."""
    _check_declared(cfg, theory)
    feq = conj(*(Iff(HasLabel(f, "x"), HasLabel(f, "y")) for f in cfg.features)) if cfg.features \
        else conj(Eq("x", "x"), Eq("y", "y"))
    return [
        Definition("ProperDom", ["x", "y"], conj(Dom("x", "y"), Not(Eq("x", "y")))),
        Definition("Branching", ["x"], ExistsNode("y1", ExistsNode("y2", conj(
            Idom("x", "y1"), Idom("x", "y2"), Not(Eq("y1", "y2")))))),
        Definition("CCommands", ["x", "y"], conj(
            Not(Dom("x", "y")), Not(Dom("y", "x")),
            ForallNode("z", Implies(conj(Apply("ProperDom", ["z", "x"]), Apply("Branching", ["z"])), Dom("z", "y"))))),
        Definition("Intervenes", ["z", "x", "y"], conj(Apply("ProperDom", ["z", "y"]), Not(Dom("z", "x")))),
        Definition("InterveningBarrier", ["z", "x", "y"],
                   conj(HasLabel(cfg.barrier, "z"), Apply("Intervenes", ["z", "x", "y"]))),
        Definition("FEq", ["x", "y"], feq),
        Definition("AbarAntecedentGoverns", ["x", "y"], conj(
            Not(HasLabel(cfg.apos, "x")), Apply("CCommands", ["x", "y"]), Apply("FEq", ["x", "y"]),
            _no_barrier(),
            _minimal(conj(HasLabel(cfg.spec, "z"), Not(HasLabel(cfg.apos, "z")))))),
    ]


def _link_body(cfg: GbConfig, kind: str) -> Formula:
    trace = HasLabel(cfg.traces[kind], "y")
    governs = [Apply("CCommands", ["x", "y"]), Apply("FEq", ["x", "y"]), _no_barrier()]
    if kind == "A":
        return conj(trace, HasLabel(cfg.apos, "x"), *governs,
                    _minimal(conj(HasLabel(cfg.spec, "z"), HasLabel(cfg.apos, "z"))))
    if kind == "Abar":
        return conj(trace, Apply("AbarAntecedentGoverns", ["x", "y"]))
    if kind == "AbarRef":
        return conj(trace, Not(HasLabel(cfg.apos, "x")), Apply("CCommands", ["x", "y"]),
                    Apply("SameRef", ["x", "y"]),
                    Not(ExistsNode("z", conj(Apply("SameRef", ["z", "y"]), Apply("CCommands", ["x", "z"]),
                                             Apply("CCommands", ["z", "y"])))))
    if kind == "X0":
        return conj(trace, HasLabel(cfg.head, "x"), *governs, _minimal(HasLabel(cfg.head, "z")))
    if kind == "Right":
        return conj(trace, HasLabel(cfg.rightward, "x"), Prec("y", "x"), *governs)
    raise ValueError(kind)


def emit_link(cfg: GbConfig) -> list:
    """The enabled link relations and their disjunction ``Link(x, y)``."""
    defs = []
    if "AbarRef" in cfg.links:
        defs.append(Definition("SameRef", ["x", "y"], disj(*(
            conj(HasLabel(r, "x"), HasLabel(r, "y")) for r in cfg.ref_labels))))
    for kind in cfg.links:
        defs.append(Definition(LINK_DEFS[kind], ["x", "y"], _link_body(cfg, kind)))
    defs.append(Definition("Link", ["x", "y"], disj(*(Apply(LINK_DEFS[k], ["x", "y"]) for k in cfg.links))))
    return defs


def exclusivity_axioms(cfg: GbConfig) -> list:
    """``(name, formula)`` pairs stating that no two link relations share a pair."""
    out = []
    for a, b in itertools.combinations(cfg.links, 2):
        la, lb = LINK_DEFS[a], LINK_DEFS[b]
        out.append((f"Exclusive_{la}_{lb}", ForallNode("x", ForallNode("y", Not(conj(
            Apply(la, ["x", "y"]), Apply(lb, ["x", "y"])))))))
    return out


def emit_chain(cfg: GbConfig) -> list:
    """``Unlinked``, ``Target``, ``Base`` and ``Chain(X)``."""
    linked_either = Or(Apply("Link", ["x", "y"]), Apply("Link", ["y", "x"]))
    chain = conj(
        ExistsUniqueNode("x", conj(InSet("X", "x"), Apply("Target", ["x"]))),
        ExistsUniqueNode("x", conj(InSet("X", "x"), Apply("Base", ["x"]))),
        ForallNode("x", Implies(conj(InSet("X", "x"), Not(Apply("Target", ["x"]))),
                                ExistsUniqueNode("y", conj(InSet("X", "y"), Apply("Link", ["y", "x"]))))),
        ForallNode("x", Implies(conj(InSet("X", "x"), Not(Apply("Base", ["x"]))),
                                ExistsUniqueNode("y", conj(InSet("X", "y"), Apply("Link", ["x", "y"]))))),
        ForallNode("x", ForallNode("y", Implies(conj(InSet("X", "x"), linked_either), InSet("X", "y")))),
    )
    return [
        Definition("Unlinked", ["x"], Not(ExistsNode("y", linked_either))),
        Definition("Target", ["x"], Or(HasLabel(cfg.target, "x"), Apply("Unlinked", ["x"]))),
        Definition("Base", ["x"], Or(HasLabel(cfg.base, "x"), Apply("Unlinked", ["x"]))),
        Definition("Chain", ["X"], chain),
    ]


def core_theory(cfg: GbConfig | None = None) -> Theory:
    """Labels and definitions of the shared notions only."""
    cfg = cfg or GbConfig(links=("Abar",))
    labels = (cfg.apos, cfg.spec, cfg.barrier) + cfg.features
    return Theory(labels, (), tuple(emit_gb_core(cfg))).check()


def gb_theory(cfg: GbConfig) -> Theory:
    """Every trace has an antecedent, link types never overlap, and every node lies in a chain."""
    defs = emit_gb_core(cfg) + emit_link(cfg) + emit_chain(cfg)
    markers = [HasLabel(cfg.traces[t], "y") for t in cfg.links]
    axioms = exclusivity_axioms(cfg)
    axioms.append(("TracesLicensed", ForallNode("y", Implies(disj(*markers),
                                                              ExistsNode("x", Apply("Link", ["x", "y"]))))))
    axioms.append(("ChainCover", ForallNode("x", ExistsSet("X", conj(Apply("Chain", ["X"]), InSet("X", "x"))))))
    return Theory(cfg.labels, (), tuple(defs), tuple(a for _, a in axioms), tuple(n for n, _ in axioms)).check()


ENGLISH = GbConfig(features=("Wh", "Pl"),
                   categories=("CP", "C1", "C", "IP", "I1", "I", "VP", "V1", "V", "NP"))


# -- chain reports -------------------------------------------------------------


@dataclass(frozen=True)
class ChainReport:
    chains: tuple          # frozensets of addresses, sorted by their first member
    types: tuple           # link type names per chain, None for trivial chains
    max_overlap: int

    def exceeds(self, bound: int) -> bool:
        return self.max_overlap > bound

    @property
    def nontrivial(self) -> list:
        return [(c, t) for c, t in zip(self.chains, self.types) if t is not None]

    def to_dict(self) -> dict:
        return {
            "chains": [{"members": [_fmt(a) for a in sorted(c)], "type": t} for c, t in zip(self.chains, self.types)],
            "max_overlap": self.max_overlap,
        }

    def render(self) -> str:
        lines = []
        for c, t in zip(self.chains, self.types):
            kind = t if t is not None else "trivial"
            lines.append(f"{kind}: {' '.join(_fmt(a) for a in sorted(c))}")
        lines.append(f"max_overlap: {self.max_overlap}")
        return "\n".join(lines) + "\n"


def _fmt(addr: tuple) -> str:
    return ".".join(map(str, addr)) if addr else "e"


@lru_cache(maxsize=32)
def _cached_theory(cfg: GbConfig) -> Theory:
    return gb_theory(cfg)


def chain_report(tree: LabeledTree, cfg: GbConfig, theory: Theory | None = None,
                 budget: int | None = None) -> ChainReport:
    """All chains of ``tree`` with their types and the largest same-type span overlap.

    Raises :class:`PartitionViolation` when some node lies in no chain or
    in more than one.
    """
    theory = theory or _cached_theory(cfg)
    found = find_assignments(tree, theory, Apply("Chain", ["X"]), free=["X"], budget=budget)
    chains = [frozenset(v.set_map()["X"]) for v in found]
    for addr in tree.nodes:
        n = sum(addr in c for c in chains)
        if n != 1:
            what = "no chain" if n == 0 else f"{n} chains"
            raise PartitionViolation(f"node {_fmt(addr)} lies in {what}", addr)
    chains.sort(key=lambda c: min(c))
    types = []
    for c in chains:
        kinds = set()
        for x, y in itertools.permutations(sorted(c), 2):
            for kind in cfg.links:
                if eval_formula(tree, theory, Apply(LINK_DEFS[kind], ["x", "y"]), _val(x, y)):
                    kinds.add(kind)
        types.append("+".join(k for k in LINK_TYPES if k in kinds) or None)
    return ChainReport(tuple(chains), tuple(types), _max_overlap(tree, chains, types))


def _val(x, y) -> Valuation:
    return Valuation.of({"x": x, "y": y})


def span(chain: frozenset) -> frozenset:
    """Nodes on the dominance paths from the members' lowest common dominator down to each member."""
    members = sorted(chain)
    top = members[0]
    for m in members[1:]:
        i = 0
        while i < min(len(top), len(m)) and top[i] == m[i]:
            i += 1
        top = top[:i]
    return frozenset(m[:j] for m in members for j in range(len(top), len(m) + 1))


def _max_overlap(tree: LabeledTree, chains, types) -> int:
    best = 1
    for kind in set(t for t in types if t is not None):
        spans = [span(c) for c, t in zip(chains, types) if t == kind]
        for addr in tree.nodes:
            best = max(best, sum(addr in s for s in spans))
    return best
