"""Command-line front end.

Exit status: 0 when the property holds (accepted, nonempty, within
bounds), 1 when it fails, 2 on usage or input errors, 3 when a resource
budget is exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import automata, checker
from .compile import compile_theory
from .errors import BudgetExceeded, ParseError, PartitionViolation, TreeLogicError
from .formula import ForallNode, ForallSet, Not, eliminate_constants, expand
from .gb import GbConfig, chain_report
from .syntax import parse_theory, parse_tree, print_formula, print_tree
from .tree import enumerate_trees

OK, FAIL, USAGE, BUDGET = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror or e}") from None


def _theory(path: str):
    try:
        return parse_theory(_read(path)).check()
    except ParseError as e:
        raise _Usage(f"{path}:{e}") from None


def _tree(path: str, theory=None):
    try:
        tree = parse_tree(_read(path))
    except ParseError as e:
        raise _Usage(f"{path}:{e}") from None
    if theory is not None:
        extra = sorted(tree.all_labels() - set(theory.labels))
        if extra:
            raise _Usage(f"{path}: labels not declared by the theory: {', '.join(extra)}")
        missing = sorted(set(tree.constants) ^ set(theory.constants))
        if missing:
            raise _Usage(f"{path}: constants must match the theory's declarations: {', '.join(missing)}")
    return tree


def _automaton(path: str):
    try:
        return automata.from_json(_read(path))
    except ValueError as e:
        raise _Usage(f"{path}: {e}") from None


def _emit(args, text: str, data: dict):
    if args.json:
        print(json.dumps(data, sort_keys=True))
    elif text:
        print(text, end="" if text.endswith("\n") else "\n")


def _strip_universals(phi):
    names = []
    while isinstance(phi, (ForallNode, ForallSet)):
        names.append(phi.var)
        phi = phi.body
    return names, phi


# -- commands ------------------------------------------------------------------


def cmd_check(args) -> int:
    theory = _theory(args.theory)
    tree = _tree(args.tree, theory)
    verdict = checker.satisfies(tree, theory, args.node_budget)
    if verdict.holds:
        _emit(args, "holds", {"holds": True})
        return OK
    flat = eliminate_constants(theory)
    label = flat.axiom_label(verdict.failed)
    data = {"holds": False, "axiom": verdict.failed + 1, "axiom_name": verdict.axiom_name,
            "formula": print_formula(verdict.formula)}
    lines = [f"fails: {label}: {print_formula(verdict.formula)}"]
    if args.assignments:
        names, body = _strip_universals(verdict.formula)
        found = checker.find_assignments(tree, flat, Not(body), free=names, budget=args.node_budget) if names else []
        data["assignments"] = [_valuation_dict(v) for v in found]
        lines += [f"  counterexample: {v}" for v in found]
    _emit(args, "\n".join(lines), data)
    return FAIL


def _valuation_dict(v: checker.Valuation) -> dict:
    out = {k: checker._addr(a) for k, a in v.nodes}
    out.update({k: [checker._addr(a) for a in s] for k, s in v.sets})
    return out


def cmd_compile(args) -> int:
    theory = _theory(args.theory)
    aut = compile_theory(theory, args.k, args.state_cap)
    text = automata.to_json(aut)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        _emit(args, "", {"states": aut.n_states, "output": args.output})
    else:
        sys.stdout.write(text)
    return OK


def cmd_empty(args) -> int:
    aut = _automaton(args.automaton)
    empty = automata.is_empty(aut) is None
    _emit(args, "empty" if empty else "", {"empty": empty})
    return FAIL if empty else OK


def cmd_witness(args) -> int:
    aut = _automaton(args.automaton)
    w = automata.is_empty(aut)
    if w is None:
        _emit(args, "empty", {"witness": None})
        return FAIL
    _emit(args, print_tree(w), {"witness": print_tree(w), "nodes": len(w)})
    return OK


def cmd_enumerate(args) -> int:
    theory = _theory(args.theory)
    if theory.constants:
        raise _Usage("enumerate needs a theory without constants")
    if args.max_nodes < 1:
        raise _Usage("--max-nodes must be at least 1")
    found = [t for t in enumerate_trees(args.max_nodes, args.k, theory.labels)
             if checker.satisfies(t, theory, args.node_budget)]
    if args.count:
        _emit(args, str(len(found)), {"count": len(found)})
    else:
        _emit(args, "".join(print_tree(t) + "\n" for t in found),
              {"count": len(found), "trees": [print_tree(t) for t in found]})
    return OK


def cmd_chains(args) -> int:
    theory = _theory(args.theory)
    tree = _tree(args.tree, theory)
    try:
        cfg = GbConfig.from_json(_read(args.config))
    except (ValueError, TypeError) as e:
        raise _Usage(f"{args.config}: {e}") from None
    try:
        report = chain_report(tree, cfg, theory, args.node_budget)
    except PartitionViolation as e:
        _emit(args, f"partition violation: {e}", {"violation": str(e), "node": checker._addr(e.node)})
        return FAIL
    data = report.to_dict()
    text = report.render()
    status = OK
    if args.max_overlap is not None and report.exceeds(args.max_overlap):
        text += f"max_overlap {report.max_overlap} exceeds the bound {args.max_overlap}\n"
        data["exceeds"] = args.max_overlap
        status = FAIL
    _emit(args, text, data)
    return status


def cmd_expand(args) -> int:
    theory = _theory(args.theory)
    try:
        d = theory.definition(args.name)
    except TreeLogicError as e:
        raise _Usage(str(e)) from None
    body = print_formula(expand(theory, d.body))
    _emit(args, f"{d.name}({', '.join(d.params)}) := {body}",
          {"name": d.name, "params": list(d.params), "formula": body})
    return OK


# -- wiring ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--node-budget", type=int, default=None,
                        help="largest tree on which sets are enumerated (default 20 or $TREELOGIC_NODE_BUDGET)")
    common.add_argument("--state-cap", type=int, default=automata.DEFAULT_STATE_CAP,
                        help="largest automaton built during compilation")

    p = argparse.ArgumentParser(prog="treelogic", description="Monadic second-order logic on finite trees.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="model-check a tree against a theory")
    c.add_argument("theory")
    c.add_argument("tree")
    c.add_argument("--assignments", action="store_true", help="list the valuations falsifying the failing axiom")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("compile", parents=[common], help="compile a theory to a tree automaton")
    c.add_argument("theory")
    c.add_argument("-k", type=int, default=2, help="maximum branching (default 2)")
    c.add_argument("-o", "--output", help="write the automaton here instead of stdout")
    c.set_defaults(func=cmd_compile)

    c = sub.add_parser("empty", parents=[common], help="exit 1 iff the automaton accepts nothing")
    c.add_argument("automaton")
    c.set_defaults(func=cmd_empty)

    c = sub.add_parser("witness", parents=[common], help="print a smallest accepted tree")
    c.add_argument("automaton")
    c.set_defaults(func=cmd_witness)

    c = sub.add_parser("enumerate", parents=[common], help="print the models of a theory up to a size")
    c.add_argument("theory")
    c.add_argument("--max-nodes", type=int, required=True)
    c.add_argument("-k", type=int, default=2, help="maximum branching (default 2)")
    c.add_argument("--count", action="store_true", help="print only the number of models")
    c.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("chains", parents=[common], help="report the movement chains of a tree")
    c.add_argument("theory")
    c.add_argument("tree")
    c.add_argument("config", help="JSON chain configuration")
    c.add_argument("--max-overlap", type=int, default=None, help="exit 1 when the overlap exceeds this")
    c.set_defaults(func=cmd_chains)

    c = sub.add_parser("expand", parents=[common], help="print a definition with every predicate expanded")
    c.add_argument("theory")
    c.add_argument("name")
    c.set_defaults(func=cmd_expand)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    if getattr(args, "k", 1) < 1:
        print("treelogic: -k must be at least 1", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"treelogic: {e}", file=sys.stderr)
        return BUDGET
    except (_Usage, TreeLogicError) as e:
        print(f"treelogic: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
