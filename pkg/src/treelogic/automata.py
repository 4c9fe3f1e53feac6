"""Bottom-up tree automata over bounded-branching, bitvector-labeled trees.

A symbol is a pair (bitmask, arity).  Bit ``i`` of the mask is the
``i``-th entry of ``alphabet.bits`` (labels first, then variables).  A
transition maps a symbol and a tuple of child states (its length is the
arity) to a set of target states; a leaf reads the empty tuple.

Automata produced by this module are either complete deterministic
(exactly one target for every symbol and every tuple of states) or
nondeterministic (after :func:`project` or :func:`union` of
nondeterministic inputs).  Transition tables are explicit.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable

from .errors import AlphabetMismatch, BranchingExceeded, StateCapExceeded, UnknownLabel
from .tree import LabeledTree, _compositions, _shape_addresses, label_subsets, shape_size, shapes

DEFAULT_STATE_CAP = 10 ** 6
# transition tables outgrow memory long before the state count does on wide alphabets
TRANSITION_CAP = 3 * 10 ** 6
FORMAT_VERSION = 1


@dataclass(frozen=True)
class RankedAlphabet:
    labels: tuple
    variables: tuple
    k: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.bits)) != len(self.bits):
            raise AlphabetMismatch(f"repeated bit names in {self.bits}")

    @property
    def bits(self) -> tuple:
        return self.labels + self.variables

    @property
    def n_masks(self) -> int:
        return 1 << len(self.bits)

    def mask_of(self, names: Iterable[str]) -> int:
        pos = {b: i for i, b in enumerate(self.bits)}
        m = 0
        for n in names:
            m |= 1 << pos[n]
        return m

    def names_of(self, mask: int) -> frozenset:
        return frozenset(b for i, b in enumerate(self.bits) if mask >> i & 1)


class TreeAutomaton:
    """Immutable nondeterministic bottom-up tree automaton.

    ``delta`` maps ``(mask, child_states)`` to a frozenset of targets;
    missing keys mean no transition.  States are ``0 .. n_states - 1``.
    """

    def __init__(self, alphabet: RankedAlphabet, n_states: int, finals: Iterable[int], delta: dict):
        self.alphabet = alphabet
        self.n_states = n_states
        self.finals = frozenset(finals)
        self.delta = {key: frozenset(ts) for key, ts in delta.items() if ts}
        for (mask, kids), ts in self.delta.items():
            if len(kids) > alphabet.k:
                raise AlphabetMismatch(f"transition of arity {len(kids)} exceeds k={alphabet.k}")
            if not 0 <= mask < alphabet.n_masks:
                raise AlphabetMismatch(f"mask {mask} outside the alphabet")
            if any(not 0 <= q < n_states for q in kids) or any(not 0 <= q < n_states for q in ts):
                raise ValueError("transition mentions an unknown state")
        if any(not 0 <= q < n_states for q in self.finals):
            raise ValueError("final state out of range")

    def __repr__(self):
        kind = "deterministic" if self.is_deterministic else "nondeterministic"
        return (f"<TreeAutomaton {kind} states={self.n_states} finals={len(self.finals)} "
                f"bits={self.alphabet.bits} k={self.alphabet.k}>")

    @cached_property
    def is_deterministic(self) -> bool:
        return all(len(ts) == 1 for ts in self.delta.values())

    @cached_property
    def is_complete(self) -> bool:
        a = self.alphabet
        expected = a.n_masks * sum(self.n_states ** r for r in range(a.k + 1))
        return len(self.delta) == expected

    @cached_property
    def dfa(self) -> dict:
        """``(mask, kids) -> target`` for deterministic automata."""
        if not self.is_deterministic:
            raise ValueError("automaton is nondeterministic")
        return {key: next(iter(ts)) for key, ts in self.delta.items()}

    @cached_property
    def by_arity(self) -> dict:
        out = {}
        for (m, kids), ts in self.delta.items():
            out.setdefault((m, len(kids)), []).append((kids, ts))
        return out


# -- construction by exploration ------------------------------------------


def _tuples_with_new(old: int, hi: int, arity: int):
    """Tuples over ``range(hi)`` with at least one component ``>= old``."""
    for p in range(arity):
        for pre in itertools.product(range(old), repeat=p):
            for mid in range(old, hi):
                for post in itertools.product(range(hi), repeat=arity - p - 1):
                    yield pre + (mid,) + post


def explore(alphabet: RankedAlphabet, step: Callable, final: Callable, state_cap: int = DEFAULT_STATE_CAP):
    """Build the reachable part of a deterministic automaton.

    ``step(mask, child_keys)`` returns the key of the target state; keys
    are any hashables.  ``final(key)`` decides acceptance.  The result is
    complete whenever ``step`` is total.
    """
    keys, index, delta = [], {}, {}

    def sid(key):
        i = index.get(key)
        if i is None:
            i = index[key] = len(keys)
            keys.append(key)
            if len(keys) > state_cap:
                raise StateCapExceeded(f"more than {state_cap} states")
        return i

    masks = range(alphabet.n_masks)
    for m in masks:
        delta[(m, ())] = (sid(step(m, ())),)
    old = 0
    while old < len(keys):
        hi = len(keys)
        grow = alphabet.n_masks * sum(hi ** r - old ** r for r in range(1, alphabet.k + 1))
        if len(delta) + grow > TRANSITION_CAP:
            raise StateCapExceeded(f"more than {TRANSITION_CAP} transitions over {alphabet.n_masks} symbols")
        for arity in range(1, alphabet.k + 1):
            for kids in _tuples_with_new(old, hi, arity):
                ck = tuple(keys[q] for q in kids)
                for m in masks:
                    delta[(m, kids)] = (sid(step(m, ck)),)
        old = hi
    finals = [i for i, key in enumerate(keys) if final(key)]
    return TreeAutomaton(alphabet, len(keys), finals, delta), keys


def from_step(alphabet: RankedAlphabet, step: Callable, final: Callable, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    return explore(alphabet, step, final, state_cap)[0]


def empty_automaton(alphabet: RankedAlphabet) -> TreeAutomaton:
    return from_step(alphabet, lambda m, kids: 0, lambda q: False)


def universal_automaton(alphabet: RankedAlphabet) -> TreeAutomaton:
    return from_step(alphabet, lambda m, kids: 0, lambda q: True)


# -- boolean operations ---------------------------------------------------


def _require_same(a: TreeAutomaton, b: TreeAutomaton):
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"alphabets differ: {a.alphabet} vs {b.alphabet}")


def live_states(a: TreeAutomaton) -> frozenset:
    """States occurring in some accepting run; subset constructions may drop the others."""
    live = set(a.finals)
    changed = True
    while changed:
        changed = False
        for (m, kids), ts in a.delta.items():
            if kids and not live.isdisjoint(ts):
                for q in kids:
                    if q not in live:
                        live.add(q)
                        changed = True
    return frozenset(live)


def determinize(a: TreeAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Subset construction; returns ``a`` itself when already complete and deterministic."""
    if a.is_deterministic and a.is_complete:
        return a
    delta = a.delta
    finals = a.finals
    live = live_states(a)

    def step(m, kid_sets):
        out = set()
        for kids in itertools.product(*kid_sets):
            ts = delta.get((m, kids))
            if ts:
                out |= ts
        return frozenset(out & live)

    return from_step(a.alphabet, step, lambda s: not finals.isdisjoint(s), state_cap)


def complement(a: TreeAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    d = determinize(a, state_cap)
    return TreeAutomaton(d.alphabet, d.n_states, set(range(d.n_states)) - d.finals, d.delta)


def combine(a: TreeAutomaton, b: TreeAutomaton, accept: Callable, state_cap: int = DEFAULT_STATE_CAP,
            alphabet: RankedAlphabet | None = None) -> TreeAutomaton:
    """Synchronous product of the determinized inputs with ``accept(fa, fb)`` deciding finality.

    With ``alphabet`` given, the inputs may use any subsets of its bits:
    each reads its own bits of every symbol (cylindrification).
    """
    da, db = determinize(a, state_cap), determinize(b, state_cap)
    if alphabet is None:
        _require_same(a, b)
        alphabet = a.alphabet
    pa, pb = _projection(alphabet, da.alphabet), _projection(alphabet, db.alphabet)
    ta, tb = da.dfa, db.dfa
    fa, fb = da.finals, db.finals

    def step(m, kids):
        return (ta[(pa[m], tuple(p for p, _ in kids))], tb[(pb[m], tuple(q for _, q in kids))])

    return from_step(alphabet, step, lambda pq: accept(pq[0] in fa, pq[1] in fb), state_cap)


def _projection(big: RankedAlphabet, small: RankedAlphabet) -> list:
    """For every mask over ``big``, the mask over ``small`` reading the shared bits."""
    if small.k != big.k:
        raise AlphabetMismatch(f"branching bounds differ: {small.k} vs {big.k}")
    pos = {b: i for i, b in enumerate(big.bits)}
    try:
        src = [pos[b] for b in small.bits]
    except KeyError as e:
        raise AlphabetMismatch(f"bit {e.args[0]!r} missing from {big.bits}") from None
    out = []
    for m in range(big.n_masks):
        s = 0
        for j, i in enumerate(src):
            if m >> i & 1:
                s |= 1 << j
        out.append(s)
    return out


def product(a: TreeAutomaton, b: TreeAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Intersection."""
    return combine(a, b, lambda x, y: x and y, state_cap)


def union(a: TreeAutomaton, b: TreeAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Disjoint union of the two automata (nondeterministic when needed)."""
    _require_same(a, b)
    if a.is_deterministic and a.is_complete and b.is_deterministic and b.is_complete:
        return combine(a, b, lambda x, y: x or y, state_cap)
    off = a.n_states
    delta = {}
    for (m, kids), ts in a.delta.items():
        delta.setdefault((m, kids), set()).update(ts)
    for (m, kids), ts in b.delta.items():
        delta.setdefault((m, tuple(q + off for q in kids)), set()).update(q + off for q in ts)
    return TreeAutomaton(a.alphabet, a.n_states + b.n_states,
                         set(a.finals) | {q + off for q in b.finals}, delta)


def project(a: TreeAutomaton, bit: str) -> TreeAutomaton:
    """Erase one bit: the result accepts every tree obtained from an accepted one by forgetting it."""
    al = a.alphabet
    if bit not in al.bits:
        raise AlphabetMismatch(f"{bit!r} is not a bit of {al.bits}")
    i = al.bits.index(bit)
    new = RankedAlphabet(tuple(x for x in al.labels if x != bit), tuple(x for x in al.variables if x != bit), al.k)
    low = (1 << i) - 1
    delta = {}
    for (m, kids), ts in a.delta.items():
        nm = (m & low) | ((m >> (i + 1)) << i)
        delta.setdefault((nm, kids), set()).update(ts)
    return TreeAutomaton(new, a.n_states, a.finals, delta)


def project_determinize(a: TreeAutomaton, bit: str, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """``determinize(project(a, bit))`` without materializing the intermediate automaton."""
    d = determinize(a, state_cap)
    al = d.alphabet
    i = al.bits.index(bit)
    new = RankedAlphabet(tuple(x for x in al.labels if x != bit), tuple(x for x in al.variables if x != bit), al.k)
    low = (1 << i) - 1
    t = d.dfa
    finals = d.finals
    live = live_states(d)

    def step(m, kid_sets):
        m0 = (m & low) | ((m >> i) << (i + 1))
        m1 = m0 | (1 << i)
        out = set()
        for kids in itertools.product(*kid_sets):
            out.add(t[(m0, kids)])
            out.add(t[(m1, kids)])
        return frozenset(out & live)

    return from_step(new, step, lambda s: not finals.isdisjoint(s), state_cap)


def cylindrify(a: TreeAutomaton, alphabet: RankedAlphabet, state_cap: int = DEFAULT_STATE_CAP) -> TreeAutomaton:
    """Re-express ``a`` over a larger alphabet whose extra bits it ignores."""
    if a.alphabet == alphabet:
        return a
    return combine(a, universal_automaton(RankedAlphabet((), (), alphabet.k)),
                   lambda x, y: x, state_cap, alphabet)


def minimize(a: TreeAutomaton) -> TreeAutomaton:
    """Smallest complete DFA equivalent to the complete deterministic ``a`` (Moore refinement)."""
    if not (a.is_deterministic and a.is_complete):
        raise ValueError("minimize needs a complete deterministic automaton")
    n, k, t = a.n_states, a.alphabet.k, a.dfa
    masks = range(a.alphabet.n_masks)
    contexts = [(m, j, others) for r in range(1, k + 1) for j in range(r) for m in masks
                for others in itertools.product(range(n), repeat=r - 1)]
    cls = [int(q in a.finals) for q in range(n)]
    n_cls = len(set(cls))
    while True:
        sigs = {}
        new = []
        for q in range(n):
            sig = (cls[q],) + tuple(cls[t[(m, others[:j] + (q,) + others[j:])]] for m, j, others in contexts)
            new.append(sigs.setdefault(sig, len(sigs)))
        cls = new
        if len(sigs) == n_cls:
            break
        n_cls = len(sigs)
    if n_cls == n:
        return a
    rep = {}
    for q in range(n):
        rep.setdefault(cls[q], q)
    reps = sorted(rep.values())
    delta = {}
    for m in masks:
        delta[(m, ())] = (cls[t[(m, ())]],)
        for r in range(1, k + 1):
            for kids in itertools.product(reps, repeat=r):
                delta[(m, tuple(cls[q] for q in kids))] = (cls[t[(m, kids)]],)
    return TreeAutomaton(a.alphabet, n_cls, {cls[q] for q in a.finals}, delta)


# -- running --------------------------------------------------------------


def _symbol_masks(aut: TreeAutomaton, tree: LabeledTree, valuation=None) -> list:
    al = aut.alphabet
    pos = {b: i for i, b in enumerate(al.bits)}
    node_vars, set_vars = {}, {}
    if valuation is not None:
        node_vars = {k: tuple(v) for k, v in valuation.node_map().items()}
        set_vars = {k: set(v) for k, v in valuation.set_map().items()}
    masks = []
    for addr, labs in zip(tree.nodes, tree.label_sets()):
        m = 0
        for l in labs:
            if l in al.labels or (valuation is None and l in al.variables):
                m |= 1 << pos[l]
            else:
                raise UnknownLabel(f"label {l!r} is not in the automaton alphabet {al.labels}")
        for v in al.variables:
            if node_vars.get(v) == addr or addr in set_vars.get(v, ()):
                m |= 1 << pos[v]
        masks.append(m)
    return masks


def run_states(aut: TreeAutomaton, tree: LabeledTree, valuation=None) -> frozenset:
    """States reachable at the root of ``tree``."""
    k = aut.alphabet.k
    masks = _symbol_masks(aut, tree, valuation)
    nodes = tree.nodes
    index = {a: i for i, a in enumerate(nodes)}
    states = [None] * len(nodes)
    kids = [[] for _ in nodes]
    for i in range(1, len(nodes)):
        kids[index[nodes[i][:-1]]].append(i)
    delta = aut.delta
    for i in range(len(nodes) - 1, -1, -1):
        if len(kids[i]) > k:
            raise BranchingExceeded(f"node {nodes[i]} has {len(kids[i])} children, k={k}")
        out = set()
        for combo in itertools.product(*(states[c] for c in kids[i])):
            ts = delta.get((masks[i], combo))
            if ts:
                out |= ts
        states[i] = out
    return frozenset(states[0])


def run(aut: TreeAutomaton, tree: LabeledTree, valuation=None) -> bool:
    """True iff some run of ``aut`` on ``tree`` ends in a final state at the root.

    Variable bits come from ``valuation`` when one is given; otherwise a
    tree label equal to a variable's name sets that variable's bit (this is
    how witnesses of automata with variable bits are represented).
    """
    return not aut.finals.isdisjoint(run_states(aut, tree, valuation))


# -- emptiness and witnesses ----------------------------------------------


def min_sizes(aut: TreeAutomaton) -> dict:
    """Smallest node count of a tree reaching each reachable state."""
    best = {}
    changed = True
    items = list(aut.delta.items())
    while changed:
        changed = False
        for (m, kids), ts in items:
            if all(q in best for q in kids):
                s = 1 + sum(best[q] for q in kids)
                for t in ts:
                    if s < best.get(t, s + 1):
                        best[t] = s
                        changed = True
    return best


def is_empty(aut: TreeAutomaton):
    """``None`` when the language is empty, otherwise a minimum-size accepted tree.

    Among the accepted trees of minimum node count the witness is the
    first in the canonical enumeration order of :mod:`treelogic.tree`,
    with bit names (labels and variables) as label names.
    """
    sizes = min_sizes(aut)
    reach = [sizes[q] for q in aut.finals if q in sizes]
    if not reach:
        return None
    return _first_accepted(aut, min(reach))


def _first_accepted(aut: TreeAutomaton, n: int) -> LabeledTree:
    al = aut.alphabet
    order = [al.mask_of(s) for s in label_subsets(al.bits)]
    by_arity = {}
    for (m, kids), ts in aut.delta.items():
        by_arity.setdefault(len(kids), []).append((m, kids, ts))
    free_cache = {}

    def reach(shape, fixed, start):
        """Reachable states of the subtree ``shape`` whose preorder indices start at ``start``."""
        if start >= len(fixed):
            hit = free_cache.get(shape)
            if hit is not None:
                return hit
        kid_sets, pos = [], start + 1
        for c in shape:
            kid_sets.append(reach(c, fixed, pos))
            pos += shape_size(c)
        allowed = None if start >= len(fixed) else fixed[start]
        out = set()
        for m, kids, ts in by_arity.get(len(shape), ()):
            if allowed is not None and m != allowed:
                continue
            if all(q in s for q, s in zip(kids, kid_sets)):
                out |= ts
        out = frozenset(out)
        if start >= len(fixed):
            free_cache[shape] = out
        return out

    for shape in shapes(n, al.k):
        if aut.finals.isdisjoint(reach(shape, [], 0)):
            continue
        fixed = []
        for _ in range(n):
            for m in order:
                if not aut.finals.isdisjoint(reach(shape, fixed + [m], 0)):
                    fixed.append(m)
                    break
        addrs = list(_shape_addresses(shape))
        return LabeledTree({a: al.names_of(m) for a, m in zip(addrs, fixed)})
    raise AssertionError("size bound reached no accepting shape")


def accepted_trees(aut: TreeAutomaton, max_nodes: int, state_cap: int = DEFAULT_STATE_CAP) -> list:
    """Every accepted tree with at most ``max_nodes`` nodes, in canonical enumeration order.

    Subtrees are only grown from states that can still reach acceptance
    within the node budget, so the cost tracks the language rather than
    the number of all trees.
    """
    d = determinize(aut, state_cap)
    al, t = d.alphabet, d.dfa
    k = al.k
    sizes = min_sizes(d)
    inf = max_nodes + 1
    ctx = {q: 0 for q in d.finals}
    changed = True
    while changed:
        changed = False
        for (m, kids), target in t.items():
            if target not in ctx or not all(q in sizes for q in kids):
                continue
            total = 1 + ctx[target] + sum(sizes[q] for q in kids)
            for q in kids:
                c = total - sizes[q]
                if c < ctx.get(q, inf):
                    ctx[q] = c
                    changed = True
    masks = range(al.n_masks)
    by_size = [None, {}]
    for m in masks:
        q = t[(m, ())]
        if 1 + ctx.get(q, inf) <= max_nodes:
            by_size[1].setdefault(q, []).append(((), (m,)))
    for s in range(2, max_nodes + 1):
        level = {}
        for r in range(1, k + 1):
            for parts in _compositions(s - 1, r):
                pools = [by_size[p] for p in parts]
                for kids in itertools.product(*(list(pool) for pool in pools)):
                    groups = [pool[q] for pool, q in zip(pools, kids)]
                    for m in masks:
                        q = t[(m, kids)]
                        if s + ctx.get(q, inf) > max_nodes:
                            continue
                        bucket = level.setdefault(q, [])
                        for combo in itertools.product(*groups):
                            shape = tuple(c[0] for c in combo)
                            bucket.append((shape, (m,) + tuple(x for c in combo for x in c[1])))
        by_size.append(level)
    rank = {al.mask_of(sub): i for i, sub in enumerate(label_subsets(al.bits))}
    out = []
    for s in range(1, max_nodes + 1):
        order = {sh: i for i, sh in enumerate(shapes(s, k))}
        found = [x for q in d.finals for x in by_size[s].get(q, ())]
        found.sort(key=lambda x: (order[x[0]], tuple(rank[m] for m in x[1])))
        out += [LabeledTree.from_shape(sh, [al.names_of(m) for m in ms]) for sh, ms in found]
    return out


def equivalent(a: TreeAutomaton, b: TreeAutomaton, state_cap: int = DEFAULT_STATE_CAP):
    """Return ``(True, None)`` if the languages coincide, else ``(False, witness)``.

    The witness is a minimum-size tree accepted by exactly one of the two.
    """
    diff = combine(a, b, lambda x, y: x != y, state_cap)
    w = is_empty(diff)
    return (w is None, w)


# -- serialization --------------------------------------------------------


def to_json(aut: TreeAutomaton) -> str:
    """Stable text form; one transition per line, sorted."""
    al = aut.alphabet
    head = {
        "format_version": FORMAT_VERSION,
        "labels": list(al.labels),
        "variables": list(al.variables),
        "max_branching": al.k,
        "states": aut.n_states,
        "finals": sorted(aut.finals),
    }
    lines = ["{"]
    for key, val in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(val)},")
    lines.append('  "transitions": [')
    rows = sorted((len(kids), m, kids, sorted(ts)) for (m, kids), ts in aut.delta.items())
    for j, (_, m, kids, ts) in enumerate(rows):
        sep = "," if j < len(rows) - 1 else ""
        lines.append(f"    {json.dumps([m, list(kids), ts])}{sep}")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_json(text: str) -> TreeAutomaton:
    try:
        doc = json.loads(text)
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {doc.get('format_version')!r}")
        al = RankedAlphabet(tuple(doc["labels"]), tuple(doc["variables"]), int(doc["max_branching"]))
        delta = {}
        for m, kids, ts in doc["transitions"]:
            delta.setdefault((int(m), tuple(int(q) for q in kids)), set()).update(int(t) for t in ts)
        return TreeAutomaton(al, int(doc["states"]), [int(q) for q in doc["finals"]], delta)
    except (AttributeError, KeyError, TypeError, ValueError, AlphabetMismatch) as e:
        raise ValueError(f"malformed automaton: {e}") from None
