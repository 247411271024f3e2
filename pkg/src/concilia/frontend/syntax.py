"""Lexer, recursive-descent parser and renderer for ``.ccs`` documents."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from ..errors import ConciliaError
from ..logic import And, Atom, Boundary, Bottom, Diff, Implies, Not, Or, Proposition, Top


class FrontendError(ConciliaError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        self.bare = msg
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


class CcsSyntaxError(FrontendError):
    def __init__(self, msg: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.expected = expected
        if expected:
            msg = f"{msg}; expected {' or '.join(expected)}"
        super().__init__(msg, line, col)


class ResolutionError(FrontendError):
    """A reference to an undeclared name or point, or a duplicate declaration."""


class DeclTypeError(FrontendError, TypeError):
    """A name or set used where a different kind is required."""


# parser recursion and syntax-tree depth are both bounded well below Python's stack
MAX_NESTING = 100
MAX_TREE_DEPTH = 150

# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z0-9_*][A-Za-z0-9_.'*]*)
  | (?P<punct>->|=>|[{};:,()\[\]~&|\\=\-/])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'punct' or 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CcsSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind in ("ident", "punct"):
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------- document

SetLit = tuple[str, ...]
Pos = tuple[int, int]


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class SpaceDecl:
    name: str
    points: tuple[str, ...]
    opens: tuple[SetLit, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ConciliationDecl:
    name: str
    space: str
    carriers: tuple[tuple[SetLit, tuple[str, ...]], ...]
    mediations: tuple[tuple[SetLit, SetLit, tuple[tuple[str, str], ...]], ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class AutoConciliationDecl:
    name: str
    kind: str  # zeta | terminal | constant
    space: str
    elements: tuple[str, ...] = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class GroupDecl:
    name: str
    space: str
    field: int  # 0 for the rationals, else the prime
    dims: tuple[tuple[SetLit, int], ...]
    matrices: tuple[tuple[SetLit, SetLit, tuple[tuple[str, ...], ...]], ...]
    inclusions: tuple[tuple[SetLit, tuple[tuple[str, ...], ...]], ...] = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class LatticeDecl:
    name: str
    elements: tuple[str, ...]
    meet: tuple[tuple[str, ...], ...]
    join: tuple[tuple[str, ...], ...]
    monoid: tuple[tuple[str, ...], ...] | None = None
    identity: str | None = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class CoveringDecl:
    name: str
    space: str
    sets: tuple[SetLit, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class PropDecl:
    name: str
    expr: Proposition
    pos: Pos = _pos()


@dataclass(frozen=True)
class ValuationDecl:
    name: str
    space: str
    mode: str
    bindings: tuple[tuple[str, SetLit], ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class MorphismDecl:
    name: str
    source: str
    target: str
    components: tuple[tuple[SetLit, tuple[tuple[str, str], ...]], ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class PresheafDecl:
    name: str
    space: str
    sections: tuple[tuple[SetLit, tuple[str, ...]], ...]
    restrictions: tuple[tuple[SetLit, SetLit, tuple[tuple[str, str], ...]], ...]
    pos: Pos = _pos()


Decl = Union[SpaceDecl, ConciliationDecl, AutoConciliationDecl, GroupDecl, LatticeDecl,
             CoveringDecl, PropDecl, ValuationDecl, MorphismDecl, PresheafDecl]


@dataclass
class Document:
    decls: list[Decl]

    @property
    def symbols(self) -> dict[str, Decl]:
        return {d.name: d for d in self.decls}

    def __getitem__(self, name: str) -> Decl:
        return self.symbols[name]

    def __eq__(self, other):
        return isinstance(other, Document) and self.decls == other.decls


# ---------------------------------------------------------------- parser

_KEYWORDS = ("space", "conciliation", "groupconciliation", "lattice", "covering", "prop",
             "valuation", "morphism", "presheaf")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, expected: tuple[str, ...] = (), tok: Token | None = None):
        tok = tok or self.tok
        return CcsSyntaxError(msg, tok.line, tok.col, expected)

    def found(self) -> str:
        t = self.tok
        return "end of input" if t.kind == "eof" else repr(t.text)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"found {self.found()}", (repr(text),))
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"found {self.found()}", (what,))
        self.i += 1
        return t.text

    def integer(self, what: str = "integer") -> int:
        t = self.tok
        if t.kind != "ident" or not t.text.isdigit():
            raise self.error(f"found {self.found()}", (what,))
        self.i += 1
        return int(t.text)

    # top level

    def document(self) -> Document:
        decls = []
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind != "ident" or t.text not in _KEYWORDS:
                raise self.error(f"found {self.found()}", ("a declaration keyword",))
            self.i += 1
            decl = getattr(self, "decl_" + t.text)((t.line, t.col))
            decls.append(decl)
        return Document(decls)

    def set_lit(self) -> SetLit:
        self.expect("{")
        names = []
        while self.tok.kind == "ident":
            names.append(self.ident())
        if not self.at("}"):
            raise self.error(f"found {self.found()}", ("point name", "'}'"))
        self.i += 1
        return tuple(names)

    def set_list(self) -> tuple[SetLit, ...]:
        sets = [self.set_lit()]
        while self.accept(","):
            sets.append(self.set_lit())
        return tuple(sets)

    def idents(self, at_least_one: bool = True) -> tuple[str, ...]:
        names = []
        while self.tok.kind == "ident":
            names.append(self.ident())
        if at_least_one and not names:
            raise self.error(f"found {self.found()}", ("identifier",))
        return tuple(names)

    def pairs(self) -> tuple[tuple[str, str], ...]:
        out = []
        if self.tok.kind != "ident":
            return ()
        while True:
            a = self.ident("element")
            self.expect("->")
            out.append((a, self.ident("element")))
            if not self.accept(","):
                return tuple(out)

    def number(self) -> str:
        neg = self.accept("-")
        num = self.integer("number")
        den = 1
        if self.accept("/"):
            den = self.integer("denominator")
            if den == 0:
                raise self.error("zero denominator", tok=self.toks[self.i - 1])
        return str(Fraction(-num if neg else num, den))

    def grid(self, cell) -> tuple[tuple[str, ...], ...]:
        """``[[a, b], [c, d]]``; ``[]`` and empty rows ``[]`` are allowed."""
        self.expect("[")
        rows = []
        if self.at("["):
            while True:
                self.expect("[")
                row = []
                if not self.at("]"):
                    row.append(cell())
                    while self.accept(","):
                        row.append(cell())
                self.expect("]")
                rows.append(tuple(row))
                if not self.accept(","):
                    break
        self.expect("]")
        return tuple(rows)

    # declarations

    def decl_space(self, pos):
        name = self.ident("space name")
        self.expect("{")
        self.expect("points")
        self.expect(":")
        points = self.idents()
        self.expect(";")
        self.expect("opens")
        self.expect(":")
        opens = self.set_list()
        self.expect(";")
        self.expect("}")
        return SpaceDecl(name, points, opens, pos)

    def decl_conciliation(self, pos):
        name = self.ident("conciliation name")
        if self.accept("auto"):
            t = self.tok
            kind = self.ident("'zeta', 'terminal' or 'constant'")
            elems = ()
            if kind == "constant":
                self.expect("(")
                elems = self.idents()
                self.expect(")")
            elif kind not in ("zeta", "terminal"):
                raise self.error(f"unknown built-in {kind!r}",
                                 ("'zeta'", "'terminal'", "'constant'"), tok=t)
            self.expect("over")
            space = self.ident("space name")
            self.expect(";")
            return AutoConciliationDecl(name, kind, space, elems, pos)
        if not self.at("over"):
            raise self.error(f"found {self.found()}", ("'auto'", "'over'"))
        self.i += 1
        space = self.ident("space name")
        self.expect("{")
        carriers, meds = [], []
        while not self.accept("}"):
            if self.accept("carrier"):
                s = self.set_lit()
                self.expect(":")
                carriers.append((s, self.idents(at_least_one=False)))
            elif self.accept("mediation"):
                a = self.set_lit()
                self.expect("->")
                b = self.set_lit()
                self.expect(":")
                meds.append((a, b, self.pairs()))
            else:
                raise self.error(f"found {self.found()}", ("'carrier'", "'mediation'", "'}'"))
            self.expect(";")
        return ConciliationDecl(name, space, tuple(carriers), tuple(meds), pos)

    def decl_groupconciliation(self, pos):
        name = self.ident("group conciliation name")
        self.expect("over")
        space = self.ident("space name")
        self.expect("field")
        if self.accept("Q"):
            p = 0
        elif self.accept("Fp"):
            p = self.integer("prime")
        else:
            raise self.error(f"found {self.found()}", ("'Q'", "'Fp'"))
        self.expect("{")
        dims, mats, incs = [], [], []
        while not self.accept("}"):
            if self.accept("dim"):
                s = self.set_lit()
                self.expect(":")
                dims.append((s, self.integer("dimension")))
            elif self.accept("matrix"):
                a = self.set_lit()
                self.expect("->")
                b = self.set_lit()
                self.expect(":")
                mats.append((a, b, self.grid(self.number)))
            elif self.accept("inclusion"):
                s = self.set_lit()
                self.expect(":")
                incs.append((s, self.grid(self.number)))
            else:
                raise self.error(f"found {self.found()}",
                                 ("'dim'", "'matrix'", "'inclusion'", "'}'"))
            self.expect(";")
        return GroupDecl(name, space, p, tuple(dims), tuple(mats), tuple(incs), pos)

    def decl_lattice(self, pos):
        name = self.ident("lattice name")
        self.expect("{")
        self.expect("elements")
        self.expect(":")
        elems = self.idents()
        self.expect(";")
        self.expect("meet")
        self.expect(":")
        meet = self.grid(self.ident)
        self.expect(";")
        self.expect("join")
        self.expect(":")
        join = self.grid(self.ident)
        self.expect(";")
        monoid = ident = None
        if self.accept("monoid"):
            self.expect(":")
            monoid = self.grid(self.ident)
            self.expect("identity")
            ident = self.ident("identity element")
            self.expect(";")
        self.expect("}")
        return LatticeDecl(name, elems, meet, join, monoid, ident, pos)

    def decl_covering(self, pos):
        name = self.ident("covering name")
        self.expect("over")
        space = self.ident("space name")
        self.expect(":")
        sets = self.set_list()
        self.expect(";")
        return CoveringDecl(name, space, sets, pos)

    def decl_prop(self, pos):
        name = self.ident("proposition name")
        self.expect(":")
        e = self.expr()
        self.expect(";")
        return PropDecl(name, e, pos)

    def decl_valuation(self, pos):
        name = self.ident("valuation name")
        self.expect("over")
        space = self.ident("space name")
        self.expect("mode")
        if self.accept("closed"):
            mode = "closed"
        elif self.accept("open"):
            mode = "open"
        else:
            raise self.error(f"found {self.found()}", ("'closed'", "'open'"))
        self.expect("{")
        binds = []
        while not self.accept("}"):
            a = self.ident("atom")
            self.expect("=")
            binds.append((a, self.set_lit()))
            self.expect(";")
        return ValuationDecl(name, space, mode, tuple(binds), pos)

    def decl_morphism(self, pos):
        name = self.ident("morphism name")
        self.expect(":")
        src = self.ident("source conciliation")
        self.expect("->")
        dst = self.ident("target conciliation")
        self.expect("{")
        comps = []
        while not self.accept("}"):
            self.expect("component")
            s = self.set_lit()
            self.expect(":")
            comps.append((s, self.pairs()))
            self.expect(";")
        return MorphismDecl(name, src, dst, tuple(comps), pos)

    def decl_presheaf(self, pos):
        name = self.ident("presheaf name")
        self.expect("over")
        space = self.ident("space name")
        self.expect("{")
        secs, res = [], []
        while not self.accept("}"):
            if self.accept("sections"):
                s = self.set_lit()
                self.expect(":")
                secs.append((s, self.idents(at_least_one=False)))
            elif self.accept("restriction"):
                a = self.set_lit()
                self.expect("->")
                b = self.set_lit()
                self.expect(":")
                res.append((a, b, self.pairs()))
            else:
                raise self.error(f"found {self.found()}", ("'sections'", "'restriction'", "'}'"))
            self.expect(";")
        return PresheafDecl(name, space, tuple(secs), tuple(res), pos)

    # expressions: '\' and '=>' bind loosest, then '|', then '&', then prefix operators

    def expr(self) -> Proposition:
        start = self.tok
        e = self.binary()
        if _tree_depth(e) > MAX_TREE_DEPTH:
            raise self.error("expression nested too deeply", tok=start)
        return e

    def binary(self) -> Proposition:
        left = self.disj()
        while self.at("\\") or self.at("=>"):
            op = self.tok.text
            self.i += 1
            right = self.disj()
            left = Diff(left, right) if op == "\\" else Implies(left, right)
        return left

    def disj(self) -> Proposition:
        left = self.conj()
        while self.accept("|"):
            left = Or(left, self.conj())
        return left

    def conj(self) -> Proposition:
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Proposition:
        ops = []
        while self.at("~") or self.at("bd"):
            ops.append(self.tok.text)
            self.i += 1
            if self.depth + len(ops) > MAX_NESTING:
                raise self.error("expression nested too deeply")
        self.depth += len(ops)
        p = self.primary()
        self.depth -= len(ops)
        for op in reversed(ops):
            p = Not(p) if op == "~" else Boundary(p)
        return p

    def primary(self) -> Proposition:
        if self.at("("):
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise self.error("expression nested too deeply")
            self.i += 1
            p = self.binary()
            self.expect(")")
            self.depth -= 1
            return p
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            if t.text == "T":
                return Top()
            if t.text == "F":
                return Bottom()
            return Atom(t.text)
        raise self.error(f"found {self.found()}", ("atom", "'T'", "'F'", "'('", "'~'", "'bd'"))


def _tree_depth(p: Proposition) -> int:
    best = 0
    stack = [(p, 1)]
    while stack:
        q, d = stack.pop()
        best = max(best, d)
        if isinstance(q, (Not, Boundary)):
            stack.append((q.arg, d + 1))
        elif isinstance(q, (And, Or, Diff, Implies)):
            stack.append((q.left, d + 1))
            stack.append((q.right, d + 1))
    return best


def _decode(data) -> str:
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8")
    except UnicodeDecodeError as e:
        prefix = bytes(data)[: e.start].decode("utf-8")
        line = prefix.count("\n") + 1
        col = len(prefix) - (prefix.rfind("\n") + 1) + 1
        raise CcsSyntaxError("input is not valid UTF-8", line, col) from None


def parse(data: str | bytes) -> Document:
    """Parse a ``.ccs`` document; every failure is a positioned :class:`CcsSyntaxError`."""
    p = _Parser(tokenize(_decode(data)))
    return p.document()


def parse_expression(text: str) -> Proposition:
    p = _Parser(tokenize(_decode(text)))
    e = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"found {p.found()}", ("end of expression",))
    return e


# ---------------------------------------------------------------- renderer

_LEVEL = {Diff: 0, Implies: 0, Or: 1, And: 2}
_SYMBOL = {Diff: "\\", Implies: "=>", Or: "|", And: "&"}


def render_expression(p: Proposition, level: int = 0) -> str:
    if isinstance(p, Atom):
        return p.name
    if isinstance(p, Top):
        return "T"
    if isinstance(p, Bottom):
        return "F"
    if isinstance(p, Not):
        return "~" + render_expression(p.arg, 3)
    if isinstance(p, Boundary):
        return "bd " + render_expression(p.arg, 3)
    own = _LEVEL[type(p)]
    # left associative: the right operand needs parentheses at equal level
    text = (f"{render_expression(p.left, own)} {_SYMBOL[type(p)]} "
            f"{render_expression(p.right, own + 1)}")
    return f"({text})" if own < level else text


def _set(s: SetLit) -> str:
    return "{" + " ".join(s) + "}"


def _grid(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]"


def _pairs(ps) -> str:
    return ", ".join(f"{a} -> {b}" for a, b in ps)


def render_decl(d: Decl) -> str:
    if isinstance(d, SpaceDecl):
        return (f"space {d.name} {{\n  points: {' '.join(d.points)};\n"
                f"  opens: {', '.join(_set(s) for s in d.opens)};\n}}")
    if isinstance(d, AutoConciliationDecl):
        kind = f"constant({' '.join(d.elements)})" if d.kind == "constant" else d.kind
        return f"conciliation {d.name} auto {kind} over {d.space};"
    if isinstance(d, ConciliationDecl):
        body = [f"  carrier {_set(s)}: {' '.join(es)};" for s, es in d.carriers]
        body += [f"  mediation {_set(a)} -> {_set(b)}: {_pairs(ps)};" for a, b, ps in d.mediations]
        return "\n".join([f"conciliation {d.name} over {d.space} {{"] + body + ["}"])
    if isinstance(d, GroupDecl):
        fld = "Q" if not d.field else f"Fp {d.field}"
        body = [f"  dim {_set(s)}: {k};" for s, k in d.dims]
        body += [f"  matrix {_set(a)} -> {_set(b)}: {_grid(m)};" for a, b, m in d.matrices]
        body += [f"  inclusion {_set(s)}: {_grid(m)};" for s, m in d.inclusions]
        return "\n".join([f"groupconciliation {d.name} over {d.space} field {fld} {{"]
                         + body + ["}"])
    if isinstance(d, LatticeDecl):
        lines = [f"lattice {d.name} {{", f"  elements: {' '.join(d.elements)};",
                 f"  meet: {_grid(d.meet)};", f"  join: {_grid(d.join)};"]
        if d.monoid is not None:
            lines.append(f"  monoid: {_grid(d.monoid)} identity {d.identity};")
        return "\n".join(lines + ["}"])
    if isinstance(d, CoveringDecl):
        return f"covering {d.name} over {d.space}: {', '.join(_set(s) for s in d.sets)};"
    if isinstance(d, PropDecl):
        return f"prop {d.name}: {render_expression(d.expr)};"
    if isinstance(d, ValuationDecl):
        body = [f"  {a} = {_set(s)};" for a, s in d.bindings]
        return "\n".join([f"valuation {d.name} over {d.space} mode {d.mode} {{"] + body + ["}"])
    if isinstance(d, MorphismDecl):
        body = [f"  component {_set(s)}: {_pairs(ps)};" for s, ps in d.components]
        return "\n".join([f"morphism {d.name}: {d.source} -> {d.target} {{"] + body + ["}"])
    if isinstance(d, PresheafDecl):
        body = [f"  sections {_set(s)}: {' '.join(es)};" for s, es in d.sections]
        body += [f"  restriction {_set(a)} -> {_set(b)}: {_pairs(ps)};"
                 for a, b, ps in d.restrictions]
        return "\n".join([f"presheaf {d.name} over {d.space} {{"] + body + ["}"])
    raise TypeError(f"not a declaration: {d!r}")


def render(doc: Document) -> str:
    return "\n\n".join(render_decl(d) for d in doc.decls) + "\n"
