"""ASCII surface syntax for formulas, theories (``.thy``) and trees (``.tree``).

Theory files::

    label A, B;                       # monadic predicates
    const c;                          # individual constants
    def Subset(X, Y) := all x. (X(x) -> Y(x));
    axiom ex x. A(x);
    axiom Named: all x. (A(x) -> !B(x));

Tree files hold one s-expression: ``({V2} ({H,SUBCAT5}) ({N2}) ({N2}))``;
``@c`` after a label set binds constant ``c`` to that node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, SourceSpan
from .formula import (
    And, Apply, Definition, Dom, Eq, ExistsNode, ExistsSet, ExistsUniqueNode, ForallNode,
    ForallSet, Formula, HasLabel, Idom, Iff, Implies, InSet, Not, Or, Prec, Theory, NODE, SET,
    sort_of,
)
from .tree import LabeledTree

KEYWORDS = {"label", "const", "def", "axiom", "all", "ex", "All", "Ex", "idom", "dom", "prec"}
QUANT_WORDS = {"all": ForallNode, "ex": ExistsNode, "All": ForallSet, "Ex": ExistsSet, "ex!": ExistsUniqueNode}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*)"
    r"|(?P<exu>ex!)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><->|->|:=|[()\{\},;.=!&|@:])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'name', 'op', 'eof'
    text: str
    start: int
    end: int


def _span(text: str, start: int, end: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(start, end, line, col)


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("lexical", f"unexpected character {text[pos]!r}", _span(text, pos, pos + 1))
        kind = m.lastgroup
        if kind == "exu":
            out.append(Token("op", "ex!", m.start(), m.end()))
        elif kind != "ws":
            out.append(Token(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


class _Parser:
    def __init__(self, text: str, labels=(), constants=(), defs=None, allow_free=False):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.labels = set(labels)
        self.constants = set(constants)
        self.defs = dict(defs or {})  # name -> arity (or None when unknown yet)
        self.allow_free = allow_free

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, kind, msg, tok=None):
        tok = tok or self.tok
        return ParseError(kind, msg, _span(self.text, tok.start, tok.end))

    def accept(self, text):
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error("syntax", f"expected {text!r}, found {found!r}")

    def name(self, what="name"):
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            found = t.text or "end of input"
            raise self.error("syntax", f"expected {what}, found {found!r}")
        self.i += 1
        return t

    # formulas: precedence ! > & > | > -> > <->
    def formula(self, scope):
        left = self.implication(scope)
        while self.accept("<->"):
            left = Iff(left, self.implication(scope))
        return left

    def implication(self, scope):
        left = self.disjunction(scope)
        if self.accept("->"):
            return Implies(left, self.implication(scope))
        return left

    def disjunction(self, scope):
        left = self.conjunction(scope)
        while self.accept("|"):
            left = Or(left, self.conjunction(scope))
        return left

    def conjunction(self, scope):
        left = self.unary(scope)
        while self.accept("&"):
            left = And(left, self.unary(scope))
        return left

    def unary(self, scope):
        if self.accept("!"):
            return Not(self.unary(scope))
        word = self.tok.text
        if word in QUANT_WORDS and self.tok.kind in ("name", "op"):
            self.i += 1
            q = QUANT_WORDS[word]
            want = SET if q in (ExistsSet, ForallSet) else NODE
            vars_ = []
            while True:
                t = self.name("variable")
                if sort_of(t.text) != want:
                    case = "uppercase" if want == SET else "lowercase"
                    raise self.error("syntax", f"'{word}' binds {case} variables, got {t.text!r}", t)
                vars_.append(t.text)
                if not self.accept(","):
                    break
            self.expect(".")
            body = self.formula(scope | set(vars_))
            for v in reversed(vars_):
                body = q(v, body)
            return body
        return self.primary(scope)

    def node_term(self, scope):
        t = self.name("node name")
        v = t.text
        if sort_of(v) != NODE:
            raise self.error("syntax", f"{v!r} is a set name where a node is expected", t)
        if v not in scope and v not in self.constants and not self.allow_free:
            raise self.error("unknown-name", f"unknown node name {v!r}", t)
        return v

    def primary(self, scope):
        if self.accept("("):
            f = self.formula(scope)
            self.expect(")")
            return f
        t = self.tok
        if t.kind == "name" and t.text in ("idom", "dom", "prec"):
            self.i += 1
            self.expect("(")
            a = self.node_term(scope)
            self.expect(",")
            b = self.node_term(scope)
            self.expect(")")
            return {"idom": Idom, "dom": Dom, "prec": Prec}[t.text](a, b)
        if self.tok.kind == "name" and self.toks[self.i + 1].text == "=":
            left = self.node_term(scope)
            self.expect("=")
            return Eq(left, self.node_term(scope))
        t = self.name("formula")
        if self.tok.text != "(":
            raise self.error("syntax", f"expected '(' or '=' after {t.text!r}")
        self.expect("(")
        args = []
        if self.tok.text != ")":
            while True:
                a = self.name("argument")
                args.append(a)
                if not self.accept(","):
                    break
        self.expect(")")
        n = t.text
        if n in scope and sort_of(n) == SET:
            return self._membership(n, args, scope, t)
        if n in self.labels:
            if len(args) != 1:
                raise self.error("syntax", f"label {n!r} takes one argument", t)
            return HasLabel(n, self._check_node(args[0], scope))
        if n in self.defs:
            arity = self.defs[n]
            if arity is not None and arity != len(args):
                raise self.error("syntax", f"{n!r} expects {arity} arguments, got {len(args)}", t)
            for a in args:
                if sort_of(a.text) == NODE:
                    self._check_node(a, scope)
                elif a.text not in scope and not self.allow_free:
                    raise self.error("unknown-name", f"unknown set name {a.text!r}", a)
            return Apply(n, tuple(a.text for a in args))
        if sort_of(n) == SET and self.allow_free:
            return self._membership(n, args, scope, t)
        raise self.error("unknown-name", f"unknown predicate {n!r}", t)

    def _membership(self, n, args, scope, t):
        if len(args) != 1:
            raise self.error("syntax", f"set variable {n!r} takes one argument", t)
        return InSet(n, self._check_node(args[0], scope))

    def _check_node(self, tok, scope):
        v = tok.text
        if sort_of(v) != NODE:
            raise self.error("syntax", f"{v!r} is a set name where a node is expected", tok)
        if v not in scope and v not in self.constants and not self.allow_free:
            raise self.error("unknown-name", f"unknown node name {v!r}", tok)
        return v

    # theories
    def prescan(self):
        toks = self.toks
        for j, t in enumerate(toks[:-1]):
            nxt = toks[j + 1]
            if t.kind == "name" and t.text == "def" and nxt.kind == "name":
                arity = None
                if toks[j + 2].text == "(":
                    k, arity = j + 3, 0
                    while toks[k].kind == "name":
                        arity += 1
                        if toks[k + 1].text != ",":
                            break
                        k += 2
                self.defs.setdefault(nxt.text, arity)
            if t.kind == "name" and t.text in ("label", "const"):
                k = j + 1
                while toks[k].kind == "name":
                    (self.labels if t.text == "label" else self.constants).add(toks[k].text)
                    if toks[k + 1].text != ",":
                        break
                    k += 2

    def theory(self) -> Theory:
        self.prescan()
        labels, consts, defs, axioms, names = [], [], [], [], []
        declared = {}

        def declare(tok, kind):
            if tok.text in declared:
                raise self.error("redeclaration", f"{tok.text!r} already declared as {declared[tok.text]}", tok)
            declared[tok.text] = kind

        while self.tok.kind != "eof":
            kw = self.tok
            if kw.text in ("label", "const") and kw.kind == "name":
                self.i += 1
                while True:
                    t = self.name(kw.text + " name")
                    if kw.text == "const" and sort_of(t.text) != NODE:
                        raise self.error("syntax", "constant names must start lowercase", t)
                    declare(t, kw.text)
                    (labels if kw.text == "label" else consts).append(t.text)
                    if not self.accept(","):
                        break
                self.expect(";")
            elif kw.text == "def" and kw.kind == "name":
                self.i += 1
                t = self.name("definition name")
                declare(t, "definition")
                self.expect("(")
                params = []
                if self.tok.text != ")":
                    while True:
                        p = self.name("parameter")
                        if p.text in params:
                            raise self.error("redeclaration", f"repeated parameter {p.text!r}", p)
                        params.append(p.text)
                        if not self.accept(","):
                            break
                self.expect(")")
                self.defs[t.text] = len(params)
                self.expect(":=")
                body = self.formula(set(params))
                self.expect(";")
                defs.append(Definition(t.text, tuple(params), body))
            elif kw.text == "axiom" and kw.kind == "name":
                self.i += 1
                name = None
                if self.tok.kind == "name" and self.toks[self.i + 1].text == ":":
                    name = self.name("axiom name").text
                    self.expect(":")
                axioms.append(self.formula(set()))
                names.append(name)
                self.expect(";")
            else:
                raise self.error("syntax", f"expected a declaration, found {self.tok.text or 'end of input'!r}")
        return Theory(tuple(labels), tuple(consts), tuple(defs), tuple(axioms), tuple(names))


def parse_theory(text: str) -> Theory:
    """Parse a ``.thy`` document."""
    return _Parser(text).theory()


def parse_formula(text: str, theory: Theory | None = None, free: bool = True) -> Formula:
    """Parse a single formula.

    Names resolve against ``theory`` when given.  Without a theory any
    uppercase predicate applied to one node is read as a label.  With
    ``free`` unknown variable names are accepted as free variables.
    """
    if theory is None:
        p = _LabelGuessingParser(text, allow_free=free)
    else:
        p = _Parser(text, theory.labels, theory.constants,
                    {d.name: len(d.params) for d in theory.definitions}, allow_free=free)
    f = p.formula(set())
    if p.tok.kind != "eof":
        raise p.error("syntax", f"unexpected {p.tok.text!r} after formula")
    return f


class _LabelGuessingParser(_Parser):
    def primary(self, scope):
        t = self.tok
        if (t.kind == "name" and t.text not in KEYWORDS and t.text not in scope
                and sort_of(t.text) == SET and self.toks[self.i + 1].text == "("
                and self.toks[self.i + 3].text == ")"):
            self.labels.add(t.text)
        return super().primary(scope)


# -- printing --------------------------------------------------------------

_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_QWORD = {ForallNode: "all", ExistsNode: "ex", ForallSet: "All", ExistsSet: "Ex", ExistsUniqueNode: "ex!"}


def print_formula(phi: Formula) -> str:
    return _pf(phi)


def _pf(phi) -> str:
    if isinstance(phi, (Idom, Dom, Prec)):
        return f"{type(phi).__name__.lower()}({phi.left}, {phi.right})"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, HasLabel):
        return f"{phi.label}({phi.var})"
    if isinstance(phi, InSet):
        return f"{phi.setvar}({phi.var})"
    if isinstance(phi, Apply):
        return f"{phi.name}({', '.join(phi.args)})"
    if isinstance(phi, Not):
        return "!" + _operand(phi.body, 5, True)
    if type(phi) in _LEVEL:
        lvl = _LEVEL[type(phi)]
        right_assoc = isinstance(phi, Implies)
        left = _operand(phi.left, lvl, right_assoc)
        right = _operand(phi.right, lvl, not right_assoc)
        return f"{left} {_SYM[type(phi)]} {right}"
    if type(phi) in _QWORD:
        word = _QWORD[type(phi)]
        vars_ = [phi.var]
        body = phi.body
        if word != "ex!":
            while type(body) is type(phi):
                vars_.append(body.var)
                body = body.body
        return f"{word} {', '.join(vars_)}. {_pf(body)}"
    raise TypeError(f"not a formula: {phi!r}")


def _operand(phi, lvl, strict):
    """Print a subformula, parenthesized if it binds looser than ``lvl``."""
    if type(phi) in _QWORD:
        return f"({_pf(phi)})"
    own = _LEVEL.get(type(phi), 6)
    if own < lvl or (strict and own == lvl):
        return f"({_pf(phi)})"
    return _pf(phi)


def print_theory(theory: Theory) -> str:
    lines = [f"label {l};" for l in theory.labels]
    lines += [f"const {c};" for c in theory.constants]
    for d in theory.definitions:
        lines.append(f"def {d.name}({', '.join(d.params)}) := {_pf(d.body)};")
    for f, n in zip(theory.axioms, theory.axiom_names):
        lines.append(f"axiom {n + ': ' if n else ''}{_pf(f)};")
    return "".join(l + "\n" for l in lines)


# -- trees -----------------------------------------------------------------


def parse_tree(text: str) -> LabeledTree:
    toks = tokenize(text)
    pos = 0
    labels, consts = {}, {}

    def err(kind, msg, t):
        return ParseError(kind, msg, _span(text, t.start, t.end))

    def expect(s):
        nonlocal pos
        t = toks[pos]
        if t.text != s or t.kind == "eof":
            raise err("syntax", f"expected {s!r}, found {t.text or 'end of input'!r}", t)
        pos += 1

    def node(addr):
        nonlocal pos
        expect("(")
        expect("{")
        labs = []
        if toks[pos].text != "}":
            while True:
                t = toks[pos]
                if t.kind != "name":
                    raise err("syntax", f"expected label name, found {t.text or 'end of input'!r}", t)
                labs.append(t.text)
                pos += 1
                if toks[pos].text != ",":
                    break
                pos += 1
        expect("}")
        while toks[pos].text == "@":
            pos += 1
            t = toks[pos]
            if t.kind != "name":
                raise err("syntax", "expected constant name after '@'", t)
            if t.text in consts:
                raise err("duplicate-constant", f"constant {t.text!r} bound twice", t)
            consts[t.text] = addr
            pos += 1
        labels[addr] = labs
        i = 0
        while toks[pos].text == "(":
            node(addr + (i,))
            i += 1
        expect(")")

    node(())
    if toks[pos].kind != "eof":
        raise err("syntax", f"unexpected {toks[pos].text!r} after tree", toks[pos])
    return LabeledTree(labels, consts)


def print_tree(tree: LabeledTree) -> str:
    by_addr = {}
    for c, a in tree.constants.items():
        by_addr.setdefault(a, []).append(c)

    def node(a):
        head = "({" + ",".join(sorted(tree.labels(a))) + "}"
        head += "".join("@" + c for c in sorted(by_addr.get(a, ())))
        kids = "".join(" " + node(c) for c in tree.children(a))
        return head + kids + ")"

    return node(())
