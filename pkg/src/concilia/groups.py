"""Conciliations of finite-dimensional vector spaces with exact linear mediations."""

from __future__ import annotations

from typing import Mapping, Sequence

from . import linalg as la
from .conciliation import PreConciliation
from .errors import MissingCarrier, MissingEdge, NotSubobject, PathDependence, ShapeError
from .linalg import Field, Matrix
from .report import Report
from .topology import FiniteSpace, PointSet, co_coverings, iter_bits, set_key

Edge = tuple[PointSet, PointSet]


class GroupConciliation:
    """A vector space ``F^dims[W]`` per closed set and a matrix per covering pair.

    Matrices have shape ``dim target x dim source``.
    """

    def __init__(self, space: FiniteSpace, field: Field, dims: Mapping[PointSet, int],
                 edges: Mapping[Edge, Sequence[Sequence]]):
        self.space = space
        self.field = field
        self.dims: dict[PointSet, int] = {}
        for w in space.closeds:
            if w not in dims:
                raise MissingCarrier(f"no dimension for closed set {space.format(w)}")
            if dims[w] < 0:
                raise ValueError("dimensions are nonnegative")
            self.dims[w] = int(dims[w])
        self.edges: dict[Edge, Matrix] = {}
        for w1, w2 in space.covering_pairs:
            if (w1, w2) not in edges:
                raise MissingEdge(
                    f"no matrix on covering pair {space.format(w1)} -> {space.format(w2)}")
            self.edges[(w1, w2)] = self._shape(w1, w2, edges[(w1, w2)])
        self._comp = self._materialize()
        for (w1, w2), m in edges.items():
            if (w1, w2) not in self.edges:
                if w1 & w2 != w1 or w1 not in self.dims or w2 not in self.dims:
                    raise ValueError(f"{space.format(w1)} -> {space.format(w2)} is not an "
                                     "inclusion of closed sets")
                if self._shape(w1, w2, m) != self._comp[(w1, w2)]:
                    raise PathDependence(f"given matrix {space.format(w1)} -> "
                                         f"{space.format(w2)} differs from the composite")

    def _shape(self, w1, w2, m) -> Matrix:
        rows, cols = self.dims[w2], self.dims[w1]
        m = [list(r) for r in m]
        if rows == 0 and m in ([], [[]]):
            return []
        if len(m) != rows or any(len(r) != cols for r in m):
            raise ShapeError(f"matrix for {self.space.format(w1)} -> {self.space.format(w2)} "
                             f"must be {rows}x{cols}")
        return la.convert(m, self.field)

    def _materialize(self):
        sp, F = self.space, self.field
        comp = {}
        covers = {w: sp.upper_covers(w) for w in sp.closeds}
        for w in sorted(sp.closeds, key=set_key, reverse=True):
            comp[(w, w)] = la.identity(self.dims[w], F)
            for v in sp.closeds:
                if v == w or v & w != w:
                    continue
                found = None
                for c in covers[w]:
                    if c & v != c:
                        continue
                    cand = la.matmul(comp[(c, v)], self.edges[(w, c)], F, inner=self.dims[c])
                    if found is None:
                        found = cand
                    elif cand != found:
                        raise PathDependence(f"composites {sp.format(w)} -> {sp.format(v)} "
                                             "disagree along different covering chains")
                comp[(w, v)] = found
        return comp

    def med(self, w1: PointSet, w2: PointSet) -> Matrix:
        return self._comp[(w1, w2)]

    def dim(self, w: PointSet) -> int:
        return self.dims[w]

    def __eq__(self, other):
        if not isinstance(other, GroupConciliation):
            return NotImplemented
        return (self.space == other.space and self.field == other.field
                and self.dims == other.dims and self.edges == other.edges)

    def __repr__(self):
        dims = ", ".join(f"{self.space.format(w)}:{d}" for w, d in self.dims.items())
        return f"GroupConciliation({self.field!r}; {dims})"


# fixtures


def constant_group(space: FiniteSpace, field: Field, k: int = 1) -> GroupConciliation:
    ident = la.identity(k, field)
    return GroupConciliation(space, field, {w: k for w in space.closeds},
                             {e: ident for e in space.covering_pairs})


def extension_by_zero(space: FiniteSpace, field: Field) -> GroupConciliation:
    """``F^W`` over each closed ``W``; mediations pad with zeros."""
    dims = {w: bin(w).count("1") for w in space.closeds}
    edges = {}
    for w1, w2 in space.covering_pairs:
        p1, p2 = list(iter_bits(w1)), list(iter_bits(w2))
        edges[(w1, w2)] = [[field.one if a == b else field.zero for b in p1] for a in p2]
    return GroupConciliation(space, field, dims, edges)


def functions_off(space: FiniteSpace, field: Field) -> GroupConciliation:
    """``F^(X - W)`` over each closed ``W``; mediations restrict functions."""
    full = space.full
    dims = {w: bin(full & ~w).count("1") for w in space.closeds}
    edges = {}
    for w1, w2 in space.covering_pairs:
        p1, p2 = list(iter_bits(full & ~w1)), list(iter_bits(full & ~w2))
        edges[(w1, w2)] = [[field.one if a == b else field.zero for b in p1] for a in p2]
    return GroupConciliation(space, field, dims, edges)


def linearize(g: PreConciliation, field: Field) -> GroupConciliation:
    """Free vector space on each carrier, mediations extended linearly."""
    sp = g.space
    edges = {}
    for w1, w2 in sp.covering_pairs:
        m = g.med(w1, w2)
        edges[(w1, w2)] = [[field.one if m[j] == i else field.zero for j in range(g.size(w1))]
                           for i in range(g.size(w2))]
    return GroupConciliation(sp, field, {w: g.size(w) for w in sp.closeds}, edges)


# axioms, linear form


def _joint(g: GroupConciliation, w: PointSet, members: Sequence[PointSet]) -> Matrix:
    return la.vstack([g.med(w, v) for v in members])


def matching_space(g: GroupConciliation, members: Sequence[PointSet]) -> list[list]:
    """Basis of the tuples ``(t_i)`` agreeing pairwise on unions of members."""
    F = g.field
    dims = [g.dim(v) for v in members]
    total = sum(dims)
    offs = [sum(dims[:i]) for i in range(len(dims))]
    rows = []
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            u = members[i] | members[j]
            mi, mj = g.med(members[i], u), g.med(members[j], u)
            for r in range(g.dim(u)):
                row = [F.zero] * total
                for c in range(dims[i]):
                    row[offs[i] + c] = mi[r][c]
                for c in range(dims[j]):
                    row[offs[j] + c] = F.norm(-mj[r][c])
                rows.append(row)
    return la.nullspace(rows, F, cols=total)


def check_group_conciliation(g: GroupConciliation, max_family: int | None = None) -> Report:
    """Joint injectivity and unique gluing on every co-covering of a nonempty closed set.

    For linear mediations this is the set-level check: the joint mediation
    out of ``G(W)`` is injective and its image is all of the matching space.
    """
    rep = Report("group-conciliation")
    sp, F = g.space, g.field
    with rep.timed():
        for w in sp.closeds:
            if not w:
                continue
            for fam in co_coverings(sp, w, max_family):
                rep.checked += 1
                r = la.rank(_joint(g, w, fam.members), F) if g.dim(w) else 0
                m = len(matching_space(g, fam.members))
                members = [sp.names(v) for v in fam.members]
                if r != g.dim(w):
                    rep.fail(W=sp.names(w), family=members, problem="not jointly injective",
                             rank=r, dim=g.dim(w))
                if r != m:
                    rep.fail(W=sp.names(w), family=members, problem="matching families do not glue",
                             image_dim=r, matching_dim=m)
    return rep


# associated conciliation and quotient


def _points_off(sp: FiniteSpace, w: PointSet) -> list[int]:
    return [x for x in range(sp.n) if not w >> x & 1]


def _family_space(g: GroupConciliation, w: PointSet) -> tuple[list[list], list[int]]:
    """Compatible copoint families over ``w``: kernel basis and block offsets."""
    sp, F = g.space, g.field
    cp = sp.point_copoint
    top = sp.full
    pts = _points_off(sp, w)
    dims = [g.dim(cp[x]) for x in pts]
    offs = [sum(dims[:k]) for k in range(len(pts))]
    total = sum(dims)
    rows = []

    def add(k1, m1, k2, m2, nrows):
        for r in range(nrows):
            row = [F.zero] * total
            for c in range(dims[k1]):
                row[offs[k1] + c] = m1[r][c]
            for c in range(dims[k2]):
                row[offs[k2] + c] = F.norm(row[offs[k2] + c] - m2[r][c])
            rows.append(row)

    for k, x in enumerate(pts):
        for l, y in enumerate(pts):
            if k != l and not cp[x] >> y & 1:
                add(k, g.med(cp[x], cp[y]), l, la.identity(g.dim(cp[y]), F), g.dim(cp[y]))
        if k:
            x0 = pts[0]
            add(0, g.med(cp[x0], top), k, g.med(cp[x], top), g.dim(top))
    return la.nullspace(rows, F, cols=total), offs


def associated_group_conciliation(g: GroupConciliation) -> GroupConciliation:
    """Linear counterpart of the set-level completion: same recipe, subspaces for subsets."""
    sp, F = g.space, g.field
    top = sp.full
    cp = sp.point_copoint
    basis, offs = {}, {}
    dims = {}
    for w in sp.closeds:
        if w in (0, top):
            dims[w] = g.dim(w)
        else:
            basis[w], offs[w] = _family_space(g, w)
            dims[w] = len(basis[w])

    def coords(w, vectors):
        # coordinates of vectors (given as columns) in the kernel basis of w
        n = sum(g.dim(cp[x]) for x in _points_off(sp, w))
        kb = la.columns(basis[w], n, F)
        x = la.solve(kb, vectors, F, cols=len(basis[w]))
        assert x is not None
        return x

    def stacked(w1, w2):
        # G(w1) -> direct sum over copoints of w2
        return la.vstack([g.med(w1, cp[x]) for x in _points_off(sp, w2)])

    edges = {}
    for w1, w2 in sp.covering_pairs:
        if w1 == 0 and w2 == top:
            m = g.med(0, top)
        elif w1 == 0:
            m = coords(w2, stacked(0, w2))
        elif w2 == top:
            x0 = _points_off(sp, w1)[0]
            d0 = g.dim(cp[x0])
            block = [[v[r] for v in basis[w1]] for r in range(d0)]
            m = la.matmul(g.med(cp[x0], top), block, F, inner=d0)
        else:
            pts1, pts2 = _points_off(sp, w1), _points_off(sp, w2)
            rows = []
            for x in pts2:
                k = pts1.index(x)
                for r in range(g.dim(cp[x])):
                    rows.append([v[offs[w1][k] + r] for v in basis[w1]])
            m = coords(w2, rows) if rows else []
        edges[(w1, w2)] = m if dims[w2] else []
    return GroupConciliation(sp, F, dims, edges)


def group_comparison(g: GroupConciliation, ga: GroupConciliation) -> dict[PointSet, bool]:
    """Whether the canonical map ``G(W) -> G^a(W)`` is invertible, per closed set."""
    sp, F = g.space, g.field
    top = sp.full
    cp = sp.point_copoint
    out = {}
    for w in sp.closeds:
        if w in (0, top):
            out[w] = True
            continue
        stacked = la.vstack([g.med(w, cp[x]) for x in _points_off(sp, w)])
        # the image of G(W) lies in the family space, so injective + equal dims suffices
        r = la.rank(stacked, F) if g.dim(w) else 0
        out[w] = r == g.dim(w) == ga.dim(w)
    return out


def _check_inclusion(g: GroupConciliation, h: GroupConciliation,
                     inclusion: Mapping[PointSet, Matrix]) -> dict[PointSet, Matrix]:
    sp, F = g.space, g.field
    if h.space != sp or h.field != F:
        raise NotSubobject("different space or field")
    inc = {}
    for w in sp.closeds:
        m = inclusion[w] if inclusion is not None else _default_inclusion(g.dim(w), h.dim(w), F)
        m = [list(r) for r in m]
        if g.dim(w) == 0:
            m = []
        if len(m) != g.dim(w) or any(len(r) != h.dim(w) for r in m):
            raise NotSubobject(f"inclusion at {sp.format(w)} has the wrong shape")
        m = la.convert(m, F)
        if h.dim(w) and la.rank(m, F) != h.dim(w):
            raise NotSubobject(f"inclusion at {sp.format(w)} is not injective")
        inc[w] = m
    for w1, w2 in sp.covering_pairs:
        left = la.matmul(g.med(w1, w2), inc[w1], F, inner=g.dim(w1))
        right = la.matmul(inc[w2], h.med(w1, w2), F, inner=h.dim(w2))
        if left != right:
            raise NotSubobject(f"mediation {sp.format(w1)} -> {sp.format(w2)} does not restrict")
    return inc


def _default_inclusion(n: int, k: int, F: Field) -> Matrix:
    if k == 0:
        return [[] for _ in range(n)]
    if k == n:
        return la.identity(n, F)
    raise NotSubobject("give the inclusion matrices explicitly")


def quotient(g: GroupConciliation, h: GroupConciliation,
             inclusion: Mapping[PointSet, Matrix] | None = None) -> GroupConciliation:
    """Pointwise quotient ``G(W)/H(W)``, completed to a conciliation.

    ``inclusion[W]`` embeds ``H(W)`` into ``G(W)`` (``dim G x dim H``); it
    may be omitted when each ``H(W)`` is zero or all of ``G(W)``.
    """
    sp, F = g.space, g.field
    inc = _check_inclusion(g, h, inclusion)
    proj, sect, dims = {}, {}, {}
    for w in sp.closeds:
        n = g.dim(w)
        image = [[row[j] for row in inc[w]] for j in range(h.dim(w))]
        # extend a basis of the image by standard vectors
        basis = [v for v in image]
        chosen = []
        for e in range(n):
            v = [F.one if i == e else F.zero for i in range(n)]
            if la.rank(basis + [v], F) > len(basis):
                basis.append(v)
                chosen.append(v)
        dims[w] = len(chosen)
        full = la.columns(basis, n, F)
        inv = la.solve(full, la.identity(n, F), F, cols=n) if n else []
        proj[w] = inv[len(image):] if n else []
        sect[w] = la.columns(chosen, n, F) if n else []
    edges = {}
    for w1, w2 in sp.covering_pairs:
        if not dims[w2]:
            edges[(w1, w2)] = []
            continue
        if not dims[w1]:
            edges[(w1, w2)] = [[] for _ in range(dims[w2])]
            continue
        step = la.matmul(g.med(w1, w2), sect[w1], F, inner=g.dim(w1))
        edges[(w1, w2)] = la.matmul(proj[w2], step, F, inner=g.dim(w2))
    q = GroupConciliation(sp, F, dims, edges)
    return associated_group_conciliation(q)
