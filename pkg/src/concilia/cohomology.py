"""Cochains of a group conciliation on a finite family of closed sets.

A p-cochain assigns to every strictly increasing index tuple
``j0 < ... < jp`` an element of ``G(W_j0 | ... | W_jp)``. The coboundary
sums, with alternating signs, the mediations from the union that omits one
index into the full union.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import linalg as la
from .errors import DuplicateMember, NotClosed
from .groups import GroupConciliation
from .linalg import Matrix
from .report import Report
from .topology import PointSet


@dataclass
class CochainComplex:
    group: GroupConciliation
    covering: tuple[PointSet, ...]
    max_degree: int
    # per degree: index tuples and the union each one lives over
    simplices: list[list[tuple[int, ...]]]
    unions: list[list[PointSet]]
    dims: list[int]
    # coboundary[p] : C^p -> C^(p+1), shape dims[p+1] x dims[p]
    coboundary: list[Matrix]
    warnings: list[str] = field(default_factory=list)

    def offsets(self, p: int) -> list[int]:
        out, acc = [], 0
        for u in self.unions[p]:
            out.append(acc)
            acc += self.group.dim(u)
        return out


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    dim: int
    kernel_dim: int
    image_rank: int
    # cocycles reduced against the coboundaries, in cochain coordinates
    representatives: tuple[tuple, ...]


def _union(covering, simplex) -> PointSet:
    u = 0
    for j in simplex:
        u |= covering[j]
    return u


def build_complex(g: GroupConciliation, covering: Sequence[PointSet],
                  max_degree: int | None = None) -> CochainComplex:
    sp, F = g.space, g.field
    covering = tuple(covering)
    if not covering:
        raise ValueError("a covering needs at least one member")
    for w in covering:
        sp.require_closed(w, "covering member")
        if not w:
            raise NotClosed("covering members must be nonempty")
    seen = set()
    for w in covering:
        if w in seen:
            raise DuplicateMember(f"{sp.format(w)} appears twice in the covering")
        seen.add(w)
    top = len(covering) - 1
    if max_degree is None:
        max_degree = top
    if not 0 <= max_degree <= top:
        raise ValueError(f"max degree must lie between 0 and {top}")
    warnings = []
    if _union(covering, range(len(covering))) != sp.full:
        warnings.append("the covering members do not cover the whole space")

    # one extra degree so that the top cohomology sees its outgoing coboundary
    degrees = min(max_degree + 1, top)
    simplices, unions, dims = [], [], []
    for p in range(degrees + 1):
        sims = list(itertools.combinations(range(len(covering)), p + 1))
        simplices.append(sims)
        unions.append([_union(covering, s) for s in sims])
        dims.append(sum(g.dim(u) for u in unions[-1]))
    c = CochainComplex(g, covering, max_degree, simplices, unions, dims, [], warnings)

    for p in range(max_degree + 1):
        if p + 1 > degrees:
            c.coboundary.append([])
            continue
        src_off = c.offsets(p)
        dst_off = c.offsets(p + 1)
        pos = {s: i for i, s in enumerate(simplices[p])}
        d = la.zeros(dims[p + 1], dims[p], F)
        for ti, tau in enumerate(simplices[p + 1]):
            big = unions[p + 1][ti]
            for k in range(len(tau)):
                sigma = tau[:k] + tau[k + 1:]
                si = pos[sigma]
                m = g.med(unions[p][si], big)
                sign = F.one if k % 2 == 0 else F.norm(-F.one)
                for r in range(g.dim(big)):
                    for col in range(g.dim(unions[p][si])):
                        if m[r][col]:
                            i, j = dst_off[ti] + r, src_off[si] + col
                            d[i][j] = F.norm(d[i][j] + sign * m[r][col])
        c.coboundary.append(d)
    return c


def _image_columns(c: CochainComplex, p: int) -> list[list]:
    """Spanning vectors of the image of D^(p-1) inside C^p."""
    if p == 0:
        return []
    d = c.coboundary[p - 1]
    return [[row[j] for row in d] for j in range(c.dims[p - 1])] if d else []


def cohomology(c: CochainComplex, p: int) -> CohomologyGroup:
    if not 0 <= p <= c.max_degree:
        raise ValueError(f"degree {p} is outside 0..{c.max_degree}")
    F = c.group.field
    n = c.dims[p]
    kernel = la.nullspace(c.coboundary[p], F, cols=n) if c.coboundary[p] else \
        [[F.one if i == j else F.zero for i in range(n)] for j in range(n)]
    image = _image_columns(c, p)
    img_rref, img_piv = la.rref(image, F) if image else ([], [])
    img_rank = len(img_piv)
    basis = [list(r) for r in img_rref[:img_rank]]
    reps = []
    for v in kernel:
        if la.rank(basis + [v], F) == len(basis):
            continue
        # clear the image pivots so the representative is canonical modulo B^p
        v = list(v)
        for row, pc in zip(img_rref[:img_rank], img_piv):
            if v[pc]:
                f = v[pc]
                v = [F.norm(a - f * b) for a, b in zip(v, row)]
        basis.append(v)
        reps.append(tuple(v))
    return CohomologyGroup(p, len(kernel) - img_rank, len(kernel), img_rank, tuple(reps))


def cohomology_dims(c: CochainComplex) -> list[int]:
    return [cohomology(c, p).dim for p in range(c.max_degree + 1)]


def check_dd_zero(c: CochainComplex) -> Report:
    rep = Report("coboundary-squared")
    F = c.group.field
    for p in range(len(c.coboundary) - 1):
        d0, d1 = c.coboundary[p], c.coboundary[p + 1]
        if not d0 or not d1:
            continue
        rep.checked += 1
        prod = la.matmul(d1, d0, F, inner=c.dims[p + 1])
        if not la.is_zero(prod):
            rep.fail(degree=p, problem="D^(p+1) D^p is not zero")
    return rep


def check_h0_gluing(g: GroupConciliation, covering: Sequence[PointSet]) -> Report:
    """``G(meet of the covering) -> Z^0`` must be a linear isomorphism."""
    rep = Report("h0-gluing")
    sp, F = g.space, g.field
    c = build_complex(g, covering, 0)
    rep.warnings.extend(c.warnings)
    w = sp.full
    for v in c.covering:
        w &= v
    restrict = la.vstack([g.med(w, v) for v in c.covering])
    r = la.rank(restrict, F) if g.dim(w) else 0
    z0 = cohomology(c, 0).kernel_dim
    rep.checked = 1
    rep.data.update(intersection=sp.names(w), dim_intersection=g.dim(w), dim_z0=z0, rank=r)
    if r != g.dim(w):
        rep.fail(W=sp.names(w), problem="restriction into the cochains is not injective",
                 rank=r, dim=g.dim(w))
    if r != z0:
        rep.fail(W=sp.names(w), problem="dimension mismatch between G(W) and Z^0",
                 dim_carrier=g.dim(w), dim_z0=z0)
    return rep
