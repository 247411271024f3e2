"""Resolve a parsed document into spaces, conciliations, lattices and the rest.

Objects are built on first use, so one broken declaration only affects the
commands that touch it. Every error raised here carries the line and
column of the declaration it came from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..category import Morphism
from ..conciliation import (PreConciliation, build_preconciliation, make_constant,
                            make_terminal, make_Z_conciliation)
from ..duality import DualPresheaf, FiniteLattice
from ..errors import ConciliaError, NotClosed, NotOpen, UnknownPoint
from ..groups import GroupConciliation
from ..linalg import Field
from ..logic import Valuation
from ..topology import FiniteSpace, PointSet, build_space
from .syntax import (AutoConciliationDecl, ConciliationDecl, CoveringDecl, Decl, DeclTypeError,
                     Document, FrontendError, GroupDecl, LatticeDecl, MorphismDecl,
                     PresheafDecl, PropDecl, ResolutionError, SetLit, SpaceDecl, ValuationDecl)


class InvalidDeclaration(FrontendError):
    """A declaration that parses but does not describe a valid object."""


KINDS = {
    SpaceDecl: "space",
    ConciliationDecl: "conciliation",
    AutoConciliationDecl: "conciliation",
    GroupDecl: "groupconciliation",
    LatticeDecl: "lattice",
    CoveringDecl: "covering",
    PropDecl: "prop",
    ValuationDecl: "valuation",
    MorphismDecl: "morphism",
    PresheafDecl: "presheaf",
}


@dataclass(frozen=True)
class Covering:
    space: FiniteSpace
    sets: tuple[PointSet, ...]


@dataclass(frozen=True)
class GroupEntry:
    group: GroupConciliation
    # explicit embedding matrices into some ambient group, by closed set
    inclusions: dict[PointSet, list[list]]


def _locate(exc: Exception, pos) -> Exception:
    line, col = pos
    if isinstance(exc, FrontendError):
        return exc
    if isinstance(exc, ConciliaError):
        exc.line, exc.col = line, col
        exc.args = (f"{line}:{col}: {exc.args[0] if exc.args else type(exc).__name__}",)
        return exc
    return InvalidDeclaration(str(exc), line, col)


class Workspace:
    def __init__(self, doc: Document):
        self.doc = doc
        self.decls: dict[str, Decl] = {}
        for d in doc.decls:
            if d.name in self.decls:
                raise ResolutionError(f"{d.name!r} is declared twice", *d.pos)
            self.decls[d.name] = d
        self._cache: dict[str, Any] = {}
        self._building: set[str] = set()

    def names(self, kind: str) -> list[str]:
        return [n for n, d in self.decls.items() if KINDS[type(d)] == kind]

    def decl(self, name: str, kind: str | None = None, pos=(0, 0)) -> Decl:
        d = self.decls.get(name)
        if d is None:
            raise ResolutionError(f"unknown name {name!r}", *pos)
        if kind is not None and KINDS[type(d)] != kind:
            raise DeclTypeError(f"{name!r} is a {KINDS[type(d)]}, not a {kind}", *pos)
        return d

    def get(self, name: str, kind: str | None = None, pos=(0, 0)) -> Any:
        d = self.decl(name, kind, pos)
        if name in self._cache:
            return self._cache[name]
        if name in self._building:
            raise ResolutionError(f"{name!r} refers to itself", *d.pos)
        self._building.add(name)
        try:
            obj = getattr(self, "_build_" + KINDS[type(d)])(d)
        except Exception as exc:  # noqa: BLE001 - re-raised with its location
            if isinstance(exc, (ConciliaError, ValueError, KeyError, ZeroDivisionError)):
                raise _locate(exc, d.pos) from None
            raise
        finally:
            self._building.discard(name)
        self._cache[name] = obj
        return obj

    def build_all(self) -> dict[str, Any]:
        return {name: self.get(name) for name in self.decls}

    # helpers

    def mask(self, space: FiniteSpace, s: SetLit, pos) -> PointSet:
        try:
            return space.mask(s)
        except UnknownPoint as exc:
            raise ResolutionError(str(exc), *pos) from None

    def closed(self, space: FiniteSpace, s: SetLit, pos, what="set") -> PointSet:
        m = self.mask(space, s, pos)
        if not space.is_closed(m):
            raise DeclTypeError(f"{what} {space.format(m)} is not closed", *pos)
        return m

    def opened(self, space: FiniteSpace, s: SetLit, pos, what="set") -> PointSet:
        m = self.mask(space, s, pos)
        if not space.is_open(m):
            raise DeclTypeError(f"{what} {space.format(m)} is not open", *pos)
        return m

    # builders

    def _build_space(self, d: SpaceDecl) -> FiniteSpace:
        return build_space(d.points, d.opens)

    def _build_conciliation(self, d) -> PreConciliation:
        sp = self.get(d.space, "space", d.pos)
        if isinstance(d, AutoConciliationDecl):
            if d.kind == "zeta":
                return make_Z_conciliation(sp)
            if d.kind == "terminal":
                return make_terminal(sp)
            return make_constant(sp, d.elements)
        carriers = {}
        for s, ids in d.carriers:
            w = self.closed(sp, s, d.pos, "carrier")
            if w in carriers:
                raise InvalidDeclaration(f"carrier {sp.format(w)} is given twice", *d.pos)
            carriers[w] = ids
        edges = {}
        for a, b, pairs in d.mediations:
            w1 = self.closed(sp, a, d.pos, "mediation source")
            w2 = self.closed(sp, b, d.pos, "mediation target")
            edges[(w1, w2)] = dict(pairs)
        for w in sp.closeds:
            if w not in carriers:
                raise InvalidDeclaration(f"no carrier for closed set {sp.format(w)}", *d.pos)
        return build_preconciliation(sp, carriers, edges)

    def _build_groupconciliation(self, d: GroupDecl) -> GroupEntry:
        sp = self.get(d.space, "space", d.pos)
        F = Field(d.field)
        dims = {}
        for s, k in d.dims:
            dims[self.closed(sp, s, d.pos, "dimension")] = k
        mats = {}
        for a, b, m in d.matrices:
            w1 = self.closed(sp, a, d.pos, "matrix source")
            w2 = self.closed(sp, b, d.pos, "matrix target")
            mats[(w1, w2)] = [[F(x) for x in row] for row in m]
        incs = {}
        for s, m in d.inclusions:
            incs[self.closed(sp, s, d.pos, "inclusion")] = [[F(x) for x in row] for row in m]
        return GroupEntry(GroupConciliation(sp, F, dims, mats), incs)

    def _build_lattice(self, d: LatticeDecl) -> FiniteLattice:
        idx = {e: i for i, e in enumerate(d.elements)}

        def table(rows, what):
            try:
                return tuple(tuple(idx[x] for x in r) for r in rows)
            except KeyError as exc:
                raise ResolutionError(f"{what} table mentions unknown element {exc.args[0]!r}",
                                      *d.pos) from None

        meet, join = table(d.meet, "meet"), table(d.join, "join")
        # bounds are read off the order
        n = len(d.elements)
        bottom = next((a for a in range(n) if all(meet[a][b] == a for b in range(n))), 0) \
            if len(meet) == n and all(len(r) == n for r in meet) else 0
        top = next((a for a in range(n) if all(meet[b][a] == b for b in range(n))), 0) \
            if len(meet) == n and all(len(r) == n for r in meet) else 0
        monoid = ident = None
        if d.monoid is not None:
            monoid = table(d.monoid, "monoid")
            if d.identity not in idx:
                raise ResolutionError(f"unknown identity element {d.identity!r}", *d.pos)
            ident = idx[d.identity]
        return FiniteLattice(tuple(d.elements), meet, join, bottom, top, monoid, ident)

    def _build_covering(self, d: CoveringDecl) -> Covering:
        sp = self.get(d.space, "space", d.pos)
        return Covering(sp, tuple(self.closed(sp, s, d.pos, "covering member") for s in d.sets))

    def _build_prop(self, d: PropDecl):
        return d.expr

    def _build_valuation(self, d: ValuationDecl) -> tuple[FiniteSpace, Valuation]:
        sp = self.get(d.space, "space", d.pos)
        binds = {}
        for atom, s in d.bindings:
            if atom in binds:
                raise InvalidDeclaration(f"atom {atom!r} is bound twice", *d.pos)
            binds[atom] = self.mask(sp, s, d.pos)
        val = Valuation(binds, d.mode)
        try:
            val.validate(sp)
        except (NotClosed, NotOpen) as exc:
            raise DeclTypeError(str(exc), *d.pos) from None
        return sp, val

    def _build_morphism(self, d: MorphismDecl) -> Morphism:
        src = self.get(d.source, "conciliation", d.pos)
        dst = self.get(d.target, "conciliation", d.pos)
        sp = src.space
        if dst.space != sp:
            raise DeclTypeError("source and target live over different spaces", *d.pos)
        given = {}
        for s, pairs in d.components:
            given[self.closed(sp, s, d.pos, "component")] = dict(pairs)
        comps = {}
        for w in sp.closeds:
            fn = given.get(w)
            if fn is None:
                raise InvalidDeclaration(f"no component at {sp.format(w)}", *d.pos)
            row = []
            for e in src.carriers[w]:
                if e not in fn:
                    raise InvalidDeclaration(f"component at {sp.format(w)} is undefined on {e!r}",
                                             *d.pos)
                row.append(dst.index_of(w, fn[e]))
            comps[w] = tuple(row)
        return Morphism(src, dst, comps)

    def _build_presheaf(self, d: PresheafDecl) -> DualPresheaf:
        sp = self.get(d.space, "space", d.pos)
        sections = {}
        for s, ids in d.sections:
            sections[self.opened(sp, s, d.pos, "sections over")] = tuple(ids)
        for u in sp.opens:
            if u not in sections:
                raise InvalidDeclaration(f"no sections over open set {sp.format(u)}", *d.pos)
        pos = {u: {e: i for i, e in enumerate(ids)} for u, ids in sections.items()}
        restr = {}
        for a, b, pairs in d.restrictions:
            big = self.opened(sp, a, d.pos, "restriction source")
            small = self.opened(sp, b, d.pos, "restriction target")
            if small & big != small or small == big:
                raise DeclTypeError(f"restriction must go from an open set to a smaller one",
                                    *d.pos)
            fn = dict(pairs)
            row = []
            for e in sections[big]:
                if e not in fn or fn[e] not in pos[small]:
                    raise InvalidDeclaration(f"restriction {sp.format(big)} -> {sp.format(small)} "
                                             f"is not defined on {e!r}", *d.pos)
                row.append(pos[small][fn[e]])
            restr[(small, big)] = tuple(row)
        f = DualPresheaf(sp, sections, restr)
        f.to_conciliation()
        return f


def build(doc: Document) -> Workspace:
    """Resolve every declaration, raising on the first invalid one."""
    ws = Workspace(doc)
    ws.build_all()
    return ws
