import random

from hypothesis import strategies as st

from treelogic.tree import LabeledTree


def random_tree(rng: random.Random, n: int, k: int, labels=("A", "B"), p: float = 0.5) -> LabeledTree:
    """A tree with ``n`` nodes grown by attaching each new node under a random non-full node."""
    children = {(): 0}
    order = [()]
    while len(order) < n:
        parent = rng.choice([a for a in order if children[a] < k])
        addr = parent + (children[parent],)
        children[parent] += 1
        children[addr] = 0
        order.append(addr)
    return LabeledTree({a: [l for l in labels if rng.random() < p] for a in order})


@st.composite
def trees(draw, max_nodes=8, k=3, labels=("A", "B")):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(1, max_nodes))
    return random_tree(random.Random(seed), n, k, labels)


def random_formula(rng: random.Random, depth: int, nodes=(), sets=(), labels=("A", "B")):
    """A well-sorted formula whose free variables are among ``nodes`` and ``sets``.

    Built from the AST so every atom, connective and quantifier kind occurs.
    """
    from treelogic import formula as F

    def atom():
        choices = []
        if nodes:
            choices += ["label"]
            choices += ["rel"] * 2
            if sets:
                choices += ["in"]
        if not choices:
            return None
        kind = rng.choice(choices)
        x = rng.choice(nodes)
        if kind == "label":
            return F.HasLabel(rng.choice(labels), x)
        if kind == "in":
            return F.InSet(rng.choice(sets), x)
        y = rng.choice(nodes)
        return rng.choice([F.Idom, F.Dom, F.Prec, F.Eq])(x, y)

    def go(d):
        if d == 0 or rng.random() < 0.2:
            a = atom()
            if a is not None:
                return a
            if d <= 0:
                return rng.choice([F.ExistsNode, F.ForallNode])("x0", F.HasLabel(rng.choice(labels), "x0"))
        kind = rng.choice(["not", "bin", "bin", "q", "q"])
        if kind == "not":
            return F.Not(go(d - 1))
        if kind == "bin":
            return rng.choice(F.BINARY)(go(d - 1), go(d - 1))
        nonlocal nodes, sets
        if rng.random() < 0.25 and len(sets) < 2:
            v = f"X{len(sets)}"
            sets = sets + (v,)
            body = go(d - 1)
            sets = sets[:-1]
            return rng.choice([F.ExistsSet, F.ForallSet])(v, body)
        v = f"x{len(nodes)}"
        nodes = nodes + (v,)
        body = go(d - 1)
        nodes = nodes[:-1]
        return rng.choice([F.ExistsNode, F.ForallNode, F.ExistsUniqueNode])(v, body)

    return go(depth)


@st.composite
def formulas(draw, depth=4, nodes=(), sets=()):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_formula(random.Random(seed), depth, tuple(nodes), tuple(sets))


# -- acceptance report ----------------------------------------------------------------

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
