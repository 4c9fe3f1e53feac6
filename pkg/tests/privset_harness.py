"""Randomized Free/Propagate configurations and the iterative-closure oracle for PrivSet."""

import random

from treelogic.checker import Valuation, eval_formula, find_assignments
from treelogic.formula import Apply
from treelogic.gpsg import SUBSET, _privilege, privileged_universal, Literal
from treelogic.syntax import parse_theory
from treelogic.tree import LabeledTree, shapes

# Seed marks the non-Free nodes; Up links a node to its mother, Side links marked sisters.
THEORY = parse_theory("""
label Seed, Up, Side;
def Free_F(x) := !Seed(x);
def Free_not_F(x) := x = x;
def Propagate_F(x, y) := idom(x, y) & Up(y) | idom(y, x) & Up(x)
  | Side(x) & Side(y) & !x = y & (ex z. idom(z, x) & idom(z, y));
""").extend(definitions=[SUBSET] + _privilege(Literal("F")) + [privileged_universal("F")]).check()


def propagate_pairs(t: LabeledTree) -> set:
    pairs = set()
    for a in t.nodes:
        for b in t.nodes:
            if len(b) == len(a) + 1 and b[:-1] == a and "Up" in t.labels(b):
                pairs |= {(a, b), (b, a)}
            if a != b and a and len(a) == len(b) and a[:-1] == b[:-1] and {"Side"} <= t.labels(a) & t.labels(b):
                pairs.add((a, b))
    return pairs


def closure(t: LabeledTree) -> set:
    """Start from the non-Free nodes and add Propagate neighbours until nothing changes."""
    found = {a for a in t.nodes if "Seed" in t.labels(a)}
    pairs = propagate_pairs(t)
    while True:
        new = {x for x, y in pairs if y in found} - found
        if not new:
            return found
        found |= new


def random_configuration(rng: random.Random, max_nodes: int = 8, k: int = 3) -> LabeledTree:
    n = rng.randint(1, max_nodes)
    seed_p = rng.choice([0.0, 0.15, 0.3])
    link_p = rng.choice([0.3, 0.6, 0.9])
    labels = [[l for l, p in (("Seed", seed_p), ("Up", link_p), ("Side", link_p)) if rng.random() < p]
              for _ in range(n)]
    return LabeledTree.from_shape(rng.choice(shapes(n, k)), labels)


def check(t: LabeledTree) -> tuple:
    """(PrivSet is unique and equals the oracle, Privileged forms agree with the oracle at every node)."""
    sols = find_assignments(t, THEORY, Apply("PrivSet_F", ["X"]), ["X"])
    want = closure(t)
    privset_ok = len(sols) == 1 and set(sols[0].set_map()["X"]) == want
    nodewise = all(
        eval_formula(t, THEORY, Apply("Privileged_F", ["x"]), Valuation.of({"x": a}))
        == eval_formula(t, THEORY, Apply("PrivilegedAll_F", ["x"]), Valuation.of({"x": a}))
        == (a in want)
        for a in t.nodes)
    return privset_ok, nodewise
