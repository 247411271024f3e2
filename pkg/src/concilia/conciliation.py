"""Pre-conciliations: covariant set-valued functors on the closed sets of a
finite space, and the checks that make one a conciliation.

Carrier elements are opaque string ids. Internally an element is its index
in the carrier tuple and a mediation is a tuple of target indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    AmbiguousGlue,
    EmptyCarrier,
    IdentityViolated,
    MissingCarrier,
    MissingEdge,
    NoGlue,
    NotMatching,
    PathDependence,
    UnknownPoint,
)
from .report import Report
from .topology import UNBOUNDED_FAMILY_LIMIT, FiniteSpace, PointSet, TooLarge, co_coverings, set_key

JOINT = "joint"
STRICT = "strict"

Edge = tuple[PointSet, PointSet]


class PreConciliation:
    """Validated functor data with every composite mediation materialized.

    Build instances with :func:`build_preconciliation` (id-based input) or
    :meth:`from_indices`.
    """

    def __init__(self, space: FiniteSpace, carriers: Mapping[PointSet, Sequence[str]],
                 edges: Mapping[Edge, Sequence[int]]):
        self.space = space
        self.carriers: dict[PointSet, tuple[str, ...]] = {}
        for w in space.closeds:
            if w not in carriers:
                raise MissingCarrier(f"no carrier for closed set {space.format(w)}")
            ids = tuple(carriers[w])
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate element ids in carrier of {space.format(w)}")
            self.carriers[w] = ids
        extra = set(carriers) - space.closed_set
        if extra:
            w = min(extra, key=set_key)
            raise MissingCarrier(f"carrier given for {space.format(w)}, which is not closed")
        self.edges: dict[Edge, tuple[int, ...]] = {}
        for w1, w2 in space.covering_pairs:
            if (w1, w2) not in edges:
                raise MissingEdge(
                    f"no mediation on covering pair {space.format(w1)} -> {space.format(w2)}")
            self.edges[(w1, w2)] = self._check_map(w1, w2, edges[(w1, w2)])
        self._composites, self._paths = self._materialize()
        for (w1, w2), m in edges.items():
            if (w1, w2) in self.edges:
                continue
            m = self._check_map(w1, w2, m)
            if w1 == w2:
                if m != tuple(range(len(self.carriers[w1]))):
                    raise IdentityViolated(f"mediation on {space.format(w1)} is not the identity")
            elif w1 & w2 != w1 or w1 not in self.carriers or w2 not in self.carriers:
                raise ValueError(f"{space.format(w1)} -> {space.format(w2)} is not an inclusion "
                                 "of closed sets")
            elif m != self._composites[(w1, w2)]:
                raise PathDependence(
                    f"given mediation {space.format(w1)} -> {space.format(w2)} differs from the "
                    "composite along covering pairs",
                    ([w1, w2], self._paths[(w1, w2)]))

    @classmethod
    def from_indices(cls, space, carriers, edges):
        return cls(space, carriers, edges)

    def _check_map(self, w1, w2, m) -> tuple[int, ...]:
        m = tuple(m)
        n1, n2 = len(self.carriers.get(w1, ())), len(self.carriers.get(w2, ()))
        if len(m) != n1 or any(not 0 <= v < n2 for v in m):
            raise ValueError(f"mediation {self.space.format(w1)} -> {self.space.format(w2)} "
                             "is not a total function between the carriers")
        return m

    def _materialize(self):
        space = self.space
        comp: dict[Edge, tuple[int, ...]] = {}
        paths: dict[Edge, list[PointSet]] = {}
        covers = {w: space.upper_covers(w) for w in space.closeds}
        # largest sets first so every cover's composites already exist
        for w in sorted(space.closeds, key=set_key, reverse=True):
            comp[(w, w)] = tuple(range(len(self.carriers[w])))
            paths[(w, w)] = [w]
            for v in space.closeds:
                if v == w or v & w != w:
                    continue
                found = None
                for c in covers[w]:
                    if c & v != c:
                        continue
                    step = self.edges[(w, c)]
                    rest = comp[(c, v)]
                    cand = tuple(rest[i] for i in step)
                    if found is None:
                        found = (cand, [w] + paths[(c, v)])
                    elif cand != found[0]:
                        other = [w] + paths[(c, v)]
                        fmt = lambda p: " -> ".join(space.format(s) for s in p)
                        raise PathDependence(
                            f"paths {fmt(found[1])} and {fmt(other)} give different mediations",
                            (found[1], other))
                comp[(w, v)], paths[(w, v)] = found
        return comp, paths

    # access

    def carrier(self, w: PointSet) -> tuple[str, ...]:
        return self.carriers[w]

    def size(self, w: PointSet) -> int:
        return len(self.carriers[w])

    def med(self, w1: PointSet, w2: PointSet) -> tuple[int, ...]:
        """Composite mediation from ``w1`` to ``w2`` as an index tuple."""
        return self._composites[(w1, w2)]

    @cached_property
    def _ids(self) -> dict[PointSet, dict[str, int]]:
        return {w: {e: i for i, e in enumerate(ids)} for w, ids in self.carriers.items()}

    def index_of(self, w: PointSet, elem: str) -> int:
        try:
            return self._ids[w][elem]
        except KeyError:
            raise KeyError(f"{elem!r} is not in the carrier of {self.space.format(w)}") from None

    def push(self, w1: PointSet, w2: PointSet, elem: str) -> str:
        return self.carriers[w2][self.med(w1, w2)[self.index_of(w1, elem)]]

    def edge_maps(self) -> dict[Edge, dict[str, str]]:
        return {(w1, w2): {self.carriers[w1][i]: self.carriers[w2][j] for i, j in enumerate(m)}
                for (w1, w2), m in self.edges.items()}

    def __eq__(self, other):
        if not isinstance(other, PreConciliation):
            return NotImplemented
        return (self.space == other.space and self.carriers == other.carriers
                and self.edges == other.edges)

    def __repr__(self):
        sizes = ", ".join(f"{self.space.format(w)}:{len(c)}" for w, c in self.carriers.items())
        return f"PreConciliation({sizes})"


def build_preconciliation(space: FiniteSpace, carriers: Mapping[PointSet, Iterable[str]],
                          mediation_edges: Mapping[Edge, Mapping[str, str]]) -> PreConciliation:
    """Validate id-based functor data.

    ``mediation_edges`` must cover every covering pair of the closed-set
    poset; extra pairs are accepted and checked against the composites.
    """
    cars = {w: tuple(ids) for w, ids in carriers.items()}
    edges = {}
    for (w1, w2), fn in mediation_edges.items():
        if w1 not in cars:
            raise MissingCarrier(f"no carrier for closed set {space.format(w1)}")
        if w2 not in cars:
            raise MissingCarrier(f"no carrier for closed set {space.format(w2)}")
        dst = {e: i for i, e in enumerate(cars[w2])}
        m = []
        for e in cars[w1]:
            if e not in fn:
                raise ValueError(f"mediation {space.format(w1)} -> {space.format(w2)} "
                                 f"is undefined on {e!r}")
            if fn[e] not in dst:
                raise ValueError(f"mediation {space.format(w1)} -> {space.format(w2)} sends "
                                 f"{e!r} outside the target carrier")
            m.append(dst[fn[e]])
        unknown = set(fn) - set(cars[w1])
        if unknown:
            raise ValueError(f"mediation {space.format(w1)} -> {space.format(w2)} mentions "
                             f"unknown elements {sorted(unknown)}")
        edges[(w1, w2)] = tuple(m)
    return PreConciliation(space, cars, edges)


# canonical constructions


def zeta_id(space: FiniteSpace, z: PointSet) -> str:
    return "{" + ",".join(space.points[i] for i in range(space.n) if z >> i & 1) + "}"


def make_Z_conciliation(space: FiniteSpace) -> PreConciliation:
    """Closed supersets of each closed set, mediated by union."""
    carriers, edges = {}, {}
    pos = {}
    for w in space.closeds:
        sup = space.closed_supersets(w)
        carriers[w] = tuple(zeta_id(space, z) for z in sup)
        pos[w] = {z: i for i, z in enumerate(sup)}
    for w1, w2 in space.covering_pairs:
        edges[(w1, w2)] = tuple(pos[w2][z | w2] for z in space.closed_supersets(w1))
    return PreConciliation(space, carriers, edges)


def zeta_value(g: PreConciliation, w: PointSet, index: int) -> PointSet:
    """The closed set named by element ``index`` of a Z-conciliation carrier."""
    return g.space.closed_supersets(w)[index]


def make_terminal(space: FiniteSpace) -> PreConciliation:
    carriers = {w: ("*",) for w in space.closeds}
    edges = {e: (0,) for e in space.covering_pairs}
    return PreConciliation(space, carriers, edges)


def make_constant(space: FiniteSpace, elements: Iterable[str]) -> PreConciliation:
    elems = tuple(dict.fromkeys(elements))
    if not elems:
        raise EmptyCarrier("a constant pre-conciliation needs at least one element")
    ident = tuple(range(len(elems)))
    return PreConciliation(space, {w: elems for w in space.closeds},
                           {e: ident for e in space.covering_pairs})


# separation (unified) and gluing checks


def _targets(g: PreConciliation, include_empty: bool) -> list[PointSet]:
    return [w for w in g.space.closeds if w or include_empty]


def _family_limit(g: PreConciliation, max_family: int | None) -> int | None:
    if max_family is None and len(g.space.closeds) > UNBOUNDED_FAMILY_LIMIT:
        raise TooLarge(f"{len(g.space.closeds)} closed sets; give max_family explicitly")
    return max_family


def unified_violations(g: PreConciliation, reading: str = JOINT,
                       include_empty: bool = False) -> dict[tuple[PointSet, int, int], list[PointSet]]:
    """Pairs ``t < s`` that some co-covering of ``W`` fails to separate.

    Maps ``(W, t, s)`` to a witnessing co-covering. The joint reading asks
    that the members of each co-covering jointly tell ``t`` and ``s`` apart;
    the strict reading asks it of every single member. Reduced form: under
    the joint reading a pair is unseparated iff the closed supersets on
    which it becomes equal intersect exactly in ``W``; under the strict
    reading iff it becomes equal on some closed superset at all.
    """
    space = g.space
    out = {}
    for w in _targets(g, include_empty):
        sup = [v for v in space.closed_supersets(w) if v != w]
        meds = [(v, g.med(w, v)) for v in sup]
        n = g.size(w)
        for t in range(n):
            for s in range(t + 1, n):
                agree = [v for v, m in meds if m[t] == m[s]]
                if not agree:
                    continue
                if reading == STRICT:
                    out[(w, t, s)] = [w, agree[-1]]
                else:
                    meet = -1
                    for v in agree:
                        meet &= v
                    if meet == w:
                        out[(w, t, s)] = agree
    return out


def unified_violations_literal(g: PreConciliation, reading: str = JOINT,
                               max_family: int | None = None,
                               include_empty: bool = False) -> dict[tuple[PointSet, int, int], list[PointSet]]:
    """Same contract as :func:`unified_violations`, by enumerating co-coverings."""
    max_family = _family_limit(g, max_family)
    out = {}
    for w in _targets(g, include_empty):
        n = g.size(w)
        for fam in co_coverings(g.space, w, max_family):
            meds = [g.med(w, v) for v in fam.members]
            if reading == STRICT:
                keys = [lambda t, m=m: m[t] for m in meds]
            else:
                keys = [lambda t: tuple(m[t] for m in meds)]
            for key in keys:
                groups: dict = {}
                for t in range(n):
                    groups.setdefault(key(t), []).append(t)
                for ts in groups.values():
                    for i, t in enumerate(ts):
                        for s in ts[i + 1:]:
                            out.setdefault((w, t, s), list(fam.members))
    return out


def check_unified(g: PreConciliation, reading: str = JOINT, literal: bool = False,
                  max_family: int | None = None, include_empty: bool = False) -> Report:
    rep = Report("unified" if reading == JOINT else "unified-strict")
    with rep.timed():
        if literal:
            bad = unified_violations_literal(g, reading, max_family, include_empty)
        else:
            bad = unified_violations(g, reading, include_empty)
        rep.checked = sum(g.size(w) * (g.size(w) - 1) // 2 for w in _targets(g, include_empty))
        sp = g.space
        for (w, t, s), fam in sorted(bad.items(), key=lambda kv: (set_key(kv[0][0]), kv[0][1:])):
            rep.fail(W=sp.names(w), t=g.carriers[w][t], s=g.carriers[w][s],
                     family=[sp.names(v) for v in fam])
    rep.data["reading"] = reading
    return rep


class _Glue:
    """Caches of pairwise compatibility used while enumerating matching families."""

    def __init__(self, g: PreConciliation):
        self.g = g
        self._compat: dict[Edge, list[frozenset[int]]] = {}

    def compat(self, wi: PointSet, wj: PointSet) -> list[frozenset[int]]:
        key = (wi, wj)
        hit = self._compat.get(key)
        if hit is None:
            g = self.g
            u = wi | wj
            mi, mj = g.med(wi, u), g.med(wj, u)
            inv: dict[int, list[int]] = {}
            for tj, val in enumerate(mj):
                inv.setdefault(val, []).append(tj)
            hit = [frozenset(inv.get(val, ())) for val in mi]
            self._compat[key] = hit
        return hit

    def matching_families(self, members: Sequence[PointSet]):
        """Every tuple ``(t_i)`` that agrees pairwise on unions of members."""
        g = self.g
        k = len(members)
        tables = [[self.compat(members[i], members[j]) for i in range(j)] for j in range(k)]
        chosen: list[int] = []

        def rec(j):
            if j == k:
                yield tuple(chosen)
                return
            if j == 0:
                cands = range(g.size(members[0]))
            else:
                cands = tables[j][0][chosen[0]]
                for i in range(1, j):
                    if not cands:
                        break
                    cands = cands & tables[j][i][chosen[i]]
                cands = sorted(cands)
            for t in cands:
                chosen.append(t)
                yield from rec(j + 1)
                chosen.pop()

        yield from rec(0)


def check_conciliation(g: PreConciliation, max_family: int | None = None,
                       include_empty: bool = False) -> Report:
    """Every matching family on every co-covering of a nonempty closed set glues uniquely."""
    max_family = _family_limit(g, max_family)
    rep = Report("conciliation")
    sp = g.space
    with rep.timed():
        glue = _Glue(g)
        families = 0
        for w in _targets(g, include_empty):
            n = g.size(w)
            for fam in co_coverings(sp, w, max_family):
                families += 1
                members = fam.members
                meds = [g.med(w, v) for v in members]
                sig: dict[tuple[int, ...], list[int]] = {}
                for t in range(n):
                    sig.setdefault(tuple(m[t] for m in meds), []).append(t)
                for tup in glue.matching_families(members):
                    rep.checked += 1
                    glues = sig.get(tup, ())
                    if len(glues) == 1:
                        continue
                    rep.fail(W=sp.names(w), family=[sp.names(v) for v in members],
                             sections=[g.carriers[v][t] for v, t in zip(members, tup)],
                             problem="no glue" if not glues else "multiple glues",
                             glues=[g.carriers[w][t] for t in glues])
        rep.data["co_coverings"] = families
    return rep


def is_conciliation(g: PreConciliation, max_family: int | None = None) -> bool:
    return check_unified(g).passed and check_conciliation(g, max_family).passed


def glue(g: PreConciliation, w: PointSet, family: Sequence[PointSet],
         sections: Sequence[str]) -> str:
    """The unique element of ``G(w)`` mediating to each given section."""
    sp = g.space
    sp.require_closed(w)
    members = list(family.members) if hasattr(family, "members") else list(family)
    if len(members) != len(sections):
        raise ValueError("need exactly one section per family member")
    if not members:
        raise ValueError("empty family")
    meet = -1
    for v in members:
        sp.require_closed(v, "family member")
        meet &= v
    if meet != w:
        raise ValueError(f"family does not intersect to {sp.format(w)}")
    idx = [g.index_of(v, s) for v, s in zip(members, sections)]
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            u = members[i] | members[j]
            if g.med(members[i], u)[idx[i]] != g.med(members[j], u)[idx[j]]:
                raise NotMatching(
                    f"sections {sections[i]!r} on {sp.format(members[i])} and {sections[j]!r} on "
                    f"{sp.format(members[j])} disagree on {sp.format(u)}", (i, j))
    meds = [g.med(w, v) for v in members]
    hits = [t for t in range(g.size(w)) if all(m[t] == k for m, k in zip(meds, idx))]
    if not hits:
        raise NoGlue(f"no element of G({sp.format(w)}) restricts to the given sections")
    if len(hits) > 1:
        raise AmbiguousGlue(f"{len(hits)} elements of G({sp.format(w)}) fit the sections: "
                            f"{[g.carriers[w][t] for t in hits]}")
    return g.carriers[w][hits[0]]


# treaties


@dataclass(frozen=True)
class Treaty:
    """Agreement classes at a point.

    ``classes[k]`` lists the ``(closed set, element id)`` pairs whose
    mediation into the top carrier is ``labels[k]``.
    """

    point: str
    labels: tuple[str, ...]
    classes: tuple[tuple[tuple[PointSet, str], ...], ...]

    def class_of(self, w: PointSet, elem: str) -> int:
        for k, cls in enumerate(self.classes):
            if (w, elem) in cls:
                return k
        raise KeyError((w, elem))


def _point_index(space: FiniteSpace, x) -> int:
    if isinstance(x, str):
        if x not in space.index:
            raise UnknownPoint(f"unknown point {x!r}")
        return space.index[x]
    if not 0 <= x < space.n:
        raise UnknownPoint(f"point index {x} out of range")
    return x


def treaty(g: PreConciliation, x) -> Treaty:
    sp = g.space
    i = _point_index(sp, x)
    top = sp.full
    buckets: dict[int, list[tuple[PointSet, str]]] = {}
    for w in sp.closeds:
        if not w >> i & 1:
            continue
        m = g.med(w, top)
        for t, e in enumerate(g.carriers[w]):
            buckets.setdefault(m[t], []).append((w, e))
    keys = sorted(buckets)
    return Treaty(sp.points[i], tuple(g.carriers[top][k] for k in keys),
                  tuple(tuple(buckets[k]) for k in keys))


def agree_exists(g: PreConciliation, a: tuple[PointSet, str], b: tuple[PointSet, str]) -> bool:
    """Some closed set containing both supports identifies the two sections."""
    (w1, s), (w2, t) = a, b
    i, j = g.index_of(w1, s), g.index_of(w2, t)
    return any(g.med(w1, v)[i] == g.med(w2, v)[j]
               for v in g.space.closed_supersets(w1 | w2))


# associated conciliation


def _copoint_families(g: PreConciliation, w: PointSet) -> list[tuple[int, ...]]:
    """Compatible families ``(a_x in G(copoint x))`` over the points outside ``w``."""
    sp = g.space
    top = sp.full
    cp = sp.point_copoint
    pts = [x for x in range(sp.n) if not w >> x & 1]
    # constraints (x, y): y lies in the minimal open of x, so a_y is forced by a_x
    links = {y: [x for x in pts[:k] if not cp[x] >> y & 1 or not cp[y] >> x & 1]
             for k, y in enumerate(pts)}
    tops = {x: g.med(cp[x], top) for x in pts}
    out = []
    chosen: dict[int, int] = {}

    def ok(y, ay):
        for x in links[y]:
            ax = chosen[x]
            if not cp[x] >> y & 1 and g.med(cp[x], cp[y])[ax] != ay:
                return False
            if not cp[y] >> x & 1 and g.med(cp[y], cp[x])[ay] != ax:
                return False
        return True

    def rec(k, image):
        if k == len(pts):
            out.append(tuple(chosen[x] for x in pts))
            return
        y = pts[k]
        for ay in range(g.size(cp[y])):
            im = tops[y][ay]
            if image is not None and im != image:
                continue
            if ok(y, ay):
                chosen[y] = ay
                rec(k + 1, im)
                del chosen[y]

    rec(0, None)
    return out


def _family_id(g: PreConciliation, w: PointSet, fam: tuple[int, ...]) -> str:
    sp = g.space
    cp = sp.point_copoint
    pts = [x for x in range(sp.n) if not w >> x & 1]
    return "[" + ",".join(f"{sp.points[x]}:{g.carriers[cp[x]][a]}" for x, a in zip(pts, fam)) + "]"


def associated_conciliation(g: PreConciliation) -> PreConciliation:
    """Conciliation completion of ``g``.

    A section over a closed set ``W`` (other than the empty set and the whole
    space) is a family of elements, one in ``G(C_x)`` for each point ``x``
    outside ``W``, where ``C_x`` is the largest closed set avoiding ``x``.
    Members must agree along the specialization order and share one image in
    the top carrier. Mediations restrict families; into the top they take
    the shared image. The carriers over the empty set and the whole space are
    kept as they are.
    """
    sp = g.space
    top = sp.full
    cp = sp.point_copoint
    fams: dict[PointSet, list[tuple[int, ...]]] = {}
    carriers: dict[PointSet, tuple[str, ...]] = {}
    for w in sp.closeds:
        if w in (0, top):
            carriers[w] = g.carriers[w]
        else:
            fams[w] = _copoint_families(g, w)
            carriers[w] = tuple(_family_id(g, w, f) for f in fams[w])
    pos = {w: {f: i for i, f in enumerate(fs)} for w, fs in fams.items()}

    def as_family(src: PointSet, dst: PointSet, fam_or_elem) -> int:
        # image in G^a(dst) of an element of G^a(src)
        if dst == top:
            if src == top:
                return fam_or_elem
            if src == 0:
                return g.med(0, top)[fam_or_elem]
            x = next(x for x in range(sp.n) if not src >> x & 1)
            k = [y for y in range(sp.n) if not src >> y & 1].index(x)
            return g.med(cp[x], top)[fam_or_elem[k]]
        pts_dst = [x for x in range(sp.n) if not dst >> x & 1]
        if src == 0:
            fam = tuple(g.med(0, cp[x])[fam_or_elem] for x in pts_dst)
        else:
            pts_src = [x for x in range(sp.n) if not src >> x & 1]
            where = {x: k for k, x in enumerate(pts_src)}
            fam = tuple(fam_or_elem[where[x]] for x in pts_dst)
        return pos[dst][fam]

    edges = {}
    for w1, w2 in sp.covering_pairs:
        if w1 in (0, top):
            src_elems = range(len(carriers[w1]))
        else:
            src_elems = fams[w1]
        if w1 == 0 and w2 == 0:
            continue
        edges[(w1, w2)] = tuple(as_family(w1, w2, e) for e in src_elems)
    return PreConciliation(sp, carriers, edges)


def comparison_map(g: PreConciliation, ga: PreConciliation) -> dict[PointSet, tuple[int, ...]]:
    """Canonical map ``G(W) -> G^a(W)`` for each closed ``W``, as index tuples."""
    sp = g.space
    top = sp.full
    cp = sp.point_copoint
    out = {}
    for w in sp.closeds:
        if w in (0, top):
            out[w] = tuple(range(g.size(w)))
            continue
        pts = [x for x in range(sp.n) if not w >> x & 1]
        ids = {e: i for i, e in enumerate(ga.carriers[w])}
        row = []
        for t in range(g.size(w)):
            fam = tuple(g.med(w, cp[x])[t] for x in pts)
            row.append(ids[_family_id(g, w, fam)])
        out[w] = tuple(row)
    return out


def associate(g: PreConciliation, max_family: int | None = None) -> tuple[PreConciliation, Report]:
    """Build the associated conciliation and re-verify it."""
    rep = Report("associated-conciliation")
    with rep.timed():
        ga = associated_conciliation(g)
        rep.merge(check_unified(ga), "unified")
        rep.merge(check_conciliation(ga, max_family), "conciliation")
        comp = comparison_map(g, ga)
        bijective = all(len(set(m)) == len(m) == ga.size(w) for w, m in comp.items())
        rep.data["carrier_sizes"] = {g.space.format(w): ga.size(w) for w in g.space.closeds}
        rep.data["comparison_bijective"] = bijective
    return ga, rep
