"""Finite labeled tree domains over Gorn addresses.

A node is addressed by the tuple of 0-based child indices leading to it
from the root; the root is ``()``.  Python's tuple ordering on addresses is
exactly document (pre-)order, which is the canonical node order used
throughout the package.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .errors import AddressNotInDomain, TreeLogicError

Address = tuple

RELATIONS = ("idom", "dom", "prec", "eq")


def is_tree_domain(addresses: Iterable[Address]) -> bool:
    """True iff the set is nonempty, prefix-closed and left-sibling-closed."""
    dom = set(map(tuple, addresses))
    if not dom:
        return False
    for a in dom:
        if a and (a[:-1] not in dom or (a[-1] > 0 and a[:-1] + (a[-1] - 1,) not in dom)):
            return False
    return () in dom


def dominates(x: Address, y: Address) -> bool:
    return y[: len(x)] == x


def precedes(x: Address, y: Address) -> bool:
    if dominates(x, y) or dominates(y, x):
        return False
    return x < y


class LabeledTree:
    """Immutable finite tree domain with per-node label sets and constants.

    ``labels`` maps every address of the domain to an iterable of label
    names; addresses absent from the mapping cannot be expressed, so the
    mapping's keys *are* the domain.  ``constants`` maps constant names to
    addresses in the domain.
    """

    __slots__ = ("nodes", "_labels", "_index", "constants", "_hash")

    def __init__(self, labels: Mapping[Address, Iterable[str]], constants: Mapping[str, Address] | None = None):
        norm = {tuple(a): frozenset(ls) for a, ls in labels.items()}
        if not is_tree_domain(norm):
            raise TreeLogicError(f"not a tree domain: {sorted(norm)}")
        nodes = tuple(sorted(norm))
        consts = tuple(sorted((c, tuple(a)) for c, a in (constants or {}).items()))
        for c, a in consts:
            if a not in norm:
                raise AddressNotInDomain(f"constant {c} bound to {a}, not in domain")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_labels", tuple(norm[a] for a in nodes))
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(nodes)})
        object.__setattr__(self, "constants", dict(consts))
        object.__setattr__(self, "_hash", hash((nodes, self._labels, consts)))

    def __setattr__(self, name, value):
        raise AttributeError("LabeledTree is immutable")

    @classmethod
    def from_shape(cls, shape: tuple, labels: Iterable[Iterable[str]] = ()) -> "LabeledTree":
        """Build from a nested shape (a node is the tuple of its children) and preorder label sets."""
        addrs = list(_shape_addresses(shape))
        labs = list(labels) or [()] * len(addrs)
        if len(labs) != len(addrs):
            raise TreeLogicError("label count does not match shape size")
        return cls(dict(zip(addrs, labs)))

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, addr):
        return tuple(addr) in self._index

    def __eq__(self, other):
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return (self.nodes, self._labels, self.constants) == (other.nodes, other._labels, other.constants)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .syntax import print_tree

        return f"LabeledTree({print_tree(self)!r})"

    @property
    def domain(self) -> frozenset:
        return frozenset(self.nodes)

    def index(self, addr: Address) -> int:
        """Preorder position of ``addr``."""
        try:
            return self._index[tuple(addr)]
        except KeyError:
            raise AddressNotInDomain(f"{tuple(addr)} not in tree domain") from None

    def labels(self, addr: Address) -> frozenset:
        return self._labels[self.index(addr)]

    def label_sets(self) -> tuple:
        """Label sets in preorder."""
        return self._labels

    def all_labels(self) -> frozenset:
        return frozenset().union(*self._labels)

    def children(self, addr: Address) -> list:
        addr = tuple(addr)
        self.index(addr)
        out = []
        while addr + (len(out),) in self._index:
            out.append(addr + (len(out),))
        return out

    def max_branching(self) -> int:
        return max(len(self.children(a)) for a in self.nodes)

    def shape(self) -> tuple:
        def build(a):
            return tuple(build(c) for c in self.children(a))

        return build(())

    def relabel(self, labels: Mapping[Address, Iterable[str]]) -> "LabeledTree":
        new = {a: self.labels(a) for a in self.nodes}
        new.update({tuple(a): ls for a, ls in labels.items()})
        return LabeledTree(new, self.constants)

    def relation(self, rel: str, x: Address, y: Address) -> bool:
        return relation(self, rel, x, y)


def relation(tree: LabeledTree, rel: str, x: Address, y: Address) -> bool:
    """Evaluate one of the four signature relations on two addresses of ``tree``.

    ``dom`` is reflexive; ``prec`` holds only between dominance-incomparable
    nodes, ordered by the first index at which their paths differ.
    """
    x, y = tuple(x), tuple(y)
    tree.index(x)
    tree.index(y)
    if rel == "idom":
        return len(y) == len(x) + 1 and y[:-1] == x
    if rel == "dom":
        return dominates(x, y)
    if rel == "prec":
        return precedes(x, y)
    if rel == "eq":
        return x == y
    raise ValueError(f"unknown relation {rel!r}")


def _shape_addresses(shape: tuple, prefix: Address = ()) -> Iterator[Address]:
    yield prefix
    for i, child in enumerate(shape):
        yield from _shape_addresses(child, prefix + (i,))


def shape_size(shape: tuple) -> int:
    return 1 + sum(shape_size(c) for c in shape)


@lru_cache(maxsize=None)
def shapes(n: int, k: int) -> tuple:
    """All ordered tree shapes with exactly ``n`` nodes and branching at most ``k``.

    Order: by number of children, then by the sizes of the children
    (lexicographically), then by the children's shapes in this same order.
    """
    if n < 1:
        return ()
    if n == 1:
        return ((),)
    out = []
    for arity in range(1, k + 1):
        for sizes in _compositions(n - 1, arity):
            for kids in itertools.product(*(shapes(s, k) for s in sizes)):
                out.append(tuple(kids))
    return tuple(out)


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def label_subsets(label_set: Iterable[str]) -> list:
    """Subsets of ``label_set`` in canonical order: bitmask order over the sorted names."""
    names = sorted(set(label_set))
    return [frozenset(n for j, n in enumerate(names) if i >> j & 1) for i in range(1 << len(names))]


def enumerate_trees(max_nodes: int, max_branching: int, label_set: Iterable[str] = ()) -> Iterator[LabeledTree]:
    """Every labeled tree up to ``max_nodes`` nodes, in the canonical order.

    Trees come by node count, then shape order (see :func:`shapes`), then
    labeling: the tuple of preorder label subsets, compared
    lexicographically with subsets in :func:`label_subsets` order.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    subsets = label_subsets(label_set)
    for n in range(1, max_nodes + 1):
        for shape in shapes(n, max_branching):
            addrs = list(_shape_addresses(shape))
            for labeling in itertools.product(subsets, repeat=n):
                yield LabeledTree(dict(zip(addrs, labeling)))


def count_trees(max_nodes: int, max_branching: int, n_labels: int) -> int:
    return sum(len(shapes(n, max_branching)) * (1 << n_labels) ** n for n in range(1, max_nodes + 1))
