"""Finite lattices with an optional monoid: distributivity checks over all
subsets, the closed- and open-set lattices of a space, an exhaustive scan of
small lattices, and sheaf checking through order reversal."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .conciliation import JOINT, PreConciliation, check_conciliation, check_unified
from .errors import LatticeError, MonoidMissing, TooLarge
from .report import Report
from .topology import FiniteSpace, PointSet, set_key

# all-subset quantification costs n * 2^n table lookups
MAX_SUBSET_ELEMENTS = 16

Table = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FiniteLattice:
    """Lattice on ``elements`` given by meet and join tables of indices.

    ``monoid`` is an optional binary table with two-sided identity
    ``identity``. ``sets`` optionally records the point set each element
    stands for when the lattice comes from a space.
    """

    elements: tuple[str, ...]
    meet: Table
    join: Table
    bottom: int
    top: int
    monoid: Table | None = None
    identity: int | None = None
    sets: tuple[PointSet, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise LatticeError("a lattice needs at least one element")
        if len(set(self.elements)) != n:
            raise LatticeError("element names must be distinct")
        for name, t in (("meet", self.meet), ("join", self.join)) + (
                (("monoid", self.monoid),) if self.monoid is not None else ()):
            if len(t) != n or any(len(r) != n for r in t) or any(
                    not 0 <= v < n for r in t for v in r):
                raise LatticeError(f"{name} table must be {n}x{n} over the elements")
        if not (0 <= self.bottom < n and 0 <= self.top < n):
            raise LatticeError("bottom and top must be elements")
        self._validate_laws()

    def _validate_laws(self):
        m, j, e = self.meet, self.join, self.elements
        rng = range(len(e))
        for a in rng:
            if m[a][a] != a or j[a][a] != a:
                raise LatticeError(f"meet and join must be idempotent at {e[a]}")
            if m[a][self.bottom] != self.bottom or j[a][self.top] != self.top \
                    or j[a][self.bottom] != a or m[a][self.top] != a:
                raise LatticeError(f"{e[self.bottom]} and {e[self.top]} are not the bounds "
                                   f"(fails at {e[a]})")
            for b in rng:
                if m[a][b] != m[b][a] or j[a][b] != j[b][a]:
                    raise LatticeError(f"meet and join must commute ({e[a]}, {e[b]})")
                if m[a][j[a][b]] != a or j[a][m[a][b]] != a:
                    raise LatticeError(f"absorption fails at ({e[a]}, {e[b]})")
                for c in rng:
                    if m[m[a][b]][c] != m[a][m[b][c]] or j[j[a][b]][c] != j[a][j[b][c]]:
                        raise LatticeError(
                            f"meet or join is not associative at ({e[a]}, {e[b]}, {e[c]})")
        if self.monoid is not None:
            o, u = self.monoid, self.identity
            if u is None or not 0 <= u < len(e):
                raise LatticeError("a monoid needs an identity element")
            for a in rng:
                if o[u][a] != a or o[a][u] != a:
                    raise LatticeError(f"{e[u]} is not a two-sided identity (fails at {e[a]})")
                for b in rng:
                    for c in rng:
                        if o[o[a][b]][c] != o[a][o[b][c]]:
                            raise LatticeError(f"monoid is not associative at "
                                               f"({e[a]}, {e[b]}, {e[c]})")

    @property
    def size(self) -> int:
        return len(self.elements)

    def leq(self, a: int, b: int) -> bool:
        return self.meet[a][b] == a

    def with_monoid(self, table: Sequence[Sequence[int]], identity: int) -> FiniteLattice:
        return FiniteLattice(self.elements, self.meet, self.join, self.bottom, self.top,
                             tuple(tuple(r) for r in table), identity, self.sets)

    def with_meet_monoid(self) -> FiniteLattice:
        return self.with_monoid(self.meet, self.top)

    def with_join_monoid(self) -> FiniteLattice:
        return self.with_monoid(self.join, self.bottom)

    def name_of(self, subset_mask: int) -> list[str]:
        return [self.elements[i] for i in range(self.size) if subset_mask >> i & 1]

    @cached_property
    def order_dual(self) -> FiniteLattice:
        """Same elements with meet and join swapped; the monoid is kept."""
        return FiniteLattice(self.elements, self.join, self.meet, self.top, self.bottom,
                             self.monoid, self.identity, self.sets)


def lattice_from_order(elements: Sequence[str], leq: Callable[[int, int], bool]) -> FiniteLattice:
    """Build the tables from a partial order; raises if some meet or join is missing."""
    n = len(elements)
    rng = range(n)

    def extreme(cands, better):
        best = [c for c in cands if all(better(c, d) for d in cands)]
        return best[0] if best else None

    meet, join = [], []
    for a in rng:
        mr, jr = [], []
        for b in rng:
            lower = [c for c in rng if leq(c, a) and leq(c, b)]
            upper = [c for c in rng if leq(a, c) and leq(b, c)]
            m = extreme(lower, lambda c, d: leq(d, c))
            j = extreme(upper, lambda c, d: leq(c, d))
            if m is None or j is None:
                raise LatticeError(f"{elements[a]} and {elements[b]} lack a meet or a join")
            mr.append(m)
            jr.append(j)
        meet.append(tuple(mr))
        join.append(tuple(jr))
    bottom = extreme(list(rng), lambda c, d: leq(c, d))
    top = extreme(list(rng), lambda c, d: leq(d, c))
    return FiniteLattice(tuple(elements), tuple(meet), tuple(join), bottom, top)


def _set_lattice(space: FiniteSpace, family: Sequence[PointSet]) -> FiniteLattice:
    fam = sorted(family, key=set_key)
    pos = {s: i for i, s in enumerate(fam)}
    meet = tuple(tuple(pos[a & b] for b in fam) for a in fam)
    join = tuple(tuple(pos[a | b] for b in fam) for a in fam)
    return FiniteLattice(tuple(space.format(s) for s in fam), meet, join, pos[0],
                         pos[space.full], sets=tuple(fam))


def closed_lattice(space: FiniteSpace) -> FiniteLattice:
    """Closed sets under intersection and union (finite unions of closed sets are closed)."""
    return _set_lattice(space, space.closeds)


def open_lattice(space: FiniteSpace) -> FiniteLattice:
    return _set_lattice(space, space.opens)


def diamond_m3() -> FiniteLattice:
    names = ("0", "a", "b", "c", "1")
    return lattice_from_order(names, lambda x, y: x == y or x == 0 or y == 4)


def pentagon_n5() -> FiniteLattice:
    names = ("0", "a", "b", "c", "1")
    # 0 < a < b < 1, 0 < c < 1
    above = {0: {0, 1, 2, 3, 4}, 1: {1, 2, 4}, 2: {2, 4}, 3: {3, 4}, 4: {4}}
    return lattice_from_order(names, lambda x, y: y in above[x])


def chain(n: int) -> FiniteLattice:
    return lattice_from_order(tuple(str(i) for i in range(n)), lambda x, y: x <= y)


# the shared subset engine


def _aggregate(table: np.ndarray, values: np.ndarray, start: int) -> np.ndarray:
    """``agg`` over every subset mask of ``values`` (index ``i`` is bit ``i``)."""
    n = len(values)
    out = np.empty(1 << n, dtype=np.int64)
    out[0] = start
    for b in range(n):
        lo = out[: 1 << b]
        out[1 << b: 2 << b] = table[lo, values[b]]
    return out


def _distributivity(l: FiniteLattice, op: Table, agg: str, name: str,
                    sides: Sequence[str], limit: int) -> Report:
    """Check ``a op AGG(S) = AGG(a op S)`` (left) and ``AGG(S) op a = AGG(S op a)`` (right)."""
    rep = Report(name)
    n = l.size
    if n > limit:
        raise TooLarge(f"{n} elements exceeds the subset cap of {limit}")
    agg_table = np.array(l.meet if agg == "meet" else l.join, dtype=np.int64)
    unit = l.top if agg == "meet" else l.bottom
    optab = np.array(op, dtype=np.int64)
    with rep.timed():
        whole = _aggregate(agg_table, np.arange(n), unit)
        for side in sides:
            for a in range(n):
                if side == "left":
                    lhs = optab[a, whole]
                    rhs = _aggregate(agg_table, optab[a, :], unit)
                else:
                    lhs = optab[whole, a]
                    rhs = _aggregate(agg_table, optab[:, a], unit)
                rep.checked += len(lhs)
                for mask in np.nonzero(lhs != rhs)[0][: rep.max_counterexamples]:
                    mask = int(mask)
                    rep.fail(side=side, a=l.elements[a], subset=l.name_of(mask),
                             lhs=l.elements[int(lhs[mask])], rhs=l.elements[int(rhs[mask])])
    rep.data["law"] = f"{name}: operation distributes over {agg} of every subset"
    return rep


def check_globale(l: FiniteLattice, limit: int = MAX_SUBSET_ELEMENTS) -> Report:
    """``w | meet(Z) == meet(w | Z)`` for every element and subset."""
    return _distributivity(l, l.join, "meet", "globale", ("left",), limit)


def check_locale(l: FiniteLattice, limit: int = MAX_SUBSET_ELEMENTS) -> Report:
    """``x & join(Y) == join(x & Y)`` for every element and subset."""
    return _distributivity(l, l.meet, "join", "locale", ("left",), limit)


def check_quantale(l: FiniteLattice, limit: int = MAX_SUBSET_ELEMENTS) -> Report:
    if l.monoid is None:
        raise MonoidMissing("quantale check needs a monoid table")
    return _distributivity(l, l.monoid, "join", "quantale", ("left", "right"), limit)


def check_universale(l: FiniteLattice, limit: int = MAX_SUBSET_ELEMENTS) -> Report:
    if l.monoid is None:
        raise MonoidMissing("universale check needs a monoid table")
    return _distributivity(l, l.monoid, "meet", "universale", ("left", "right"), limit)


def check_universale_theorems(l: FiniteLattice, limit: int = MAX_SUBSET_ELEMENTS) -> Report:
    """Consequences of the universale laws.

    - monotone: ``a <= b`` implies ``a.c <= b.c`` and ``c.a <= c.b``
    - when the monoid identity is the bottom: ``a.b >= a | b``
    - when moreover ``a.a == a`` for all ``a``: the monoid is the join and the
      lattice satisfies the globale law
    """
    if l.monoid is None:
        raise MonoidMissing("universale theorems need a monoid table")
    rep = Report("universale-theorems")
    o, e = l.monoid, l.elements
    rng = range(l.size)
    for a in rng:
        for b in rng:
            if not l.leq(a, b):
                continue
            for c in rng:
                rep.checked += 1
                if not l.leq(o[a][c], o[b][c]):
                    rep.fail(theorem="monotone", a=e[a], b=e[b], c=e[c], side="right",
                             lhs=e[o[a][c]], rhs=e[o[b][c]])
                if not l.leq(o[c][a], o[c][b]):
                    rep.fail(theorem="monotone", a=e[a], b=e[b], c=e[c], side="left",
                             lhs=e[o[c][a]], rhs=e[o[c][b]])
    unit_is_bottom = l.identity == l.bottom
    rep.data["identity_is_bottom"] = unit_is_bottom
    if not unit_is_bottom:
        rep.notes.append("monoid identity differs from the bottom; "
                         "the bound a.b >= a|b was skipped")
    else:
        for a in rng:
            for b in rng:
                rep.checked += 1
                if not l.leq(l.join[a][b], o[a][b]):
                    rep.fail(theorem="above join", a=e[a], b=e[b], product=e[o[a][b]],
                             join=e[l.join[a][b]])
    idempotent = all(o[a][a] == a for a in rng)
    rep.data["idempotent"] = idempotent
    if unit_is_bottom and idempotent:
        for a in rng:
            for b in rng:
                rep.checked += 1
                if o[a][b] != l.join[a][b]:
                    rep.fail(theorem="idempotent is join", a=e[a], b=e[b],
                             product=e[o[a][b]], join=e[l.join[a][b]])
        rep.merge(check_globale(l, limit), "globale")
    else:
        rep.notes.append("monoid is not idempotent with bottom identity; "
                         "the globale consequence was skipped")
    return rep


# exhaustive small models


def _posets(k: int) -> Iterator[frozenset[tuple[int, int]]]:
    """Every partial order on ``range(k)``, as its set of strict pairs."""
    pairs = [(a, b) for a in range(k) for b in range(k) if a != b]
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = {p for p, on in zip(pairs, bits) if on}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
            continue
        yield frozenset(rel)


def _canonical(l: FiniteLattice) -> tuple:
    n = l.size
    best = None
    for perm in itertools.permutations(range(n)):
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        key = tuple(inv[l.meet[perm[i]][perm[j]]] for i in range(n) for j in range(n))
        if best is None or key < best:
            best = key
    return best


def small_lattices(max_size: int = 5) -> list[FiniteLattice]:
    """One lattice per isomorphism class with at most ``max_size`` elements."""
    out = []
    seen = set()
    for n in range(1, max_size + 1):
        if n == 1:
            out.append(chain(1))
            continue
        k = n - 2
        for rel in _posets(k):
            # 0 is the bottom, n-1 the top, 1..k the middle
            def leq(x, y, rel=rel):
                return x == y or x == 0 or y == n - 1 or (x, y) in {
                    (a + 1, b + 1) for a, b in rel}
            try:
                l = lattice_from_order(tuple(str(i) for i in range(n)), leq)
            except LatticeError:
                continue
            key = (n, _canonical(l))
            if key not in seen:
                seen.add(key)
                out.append(l)
    return out


def _meet_endomaps(l: FiniteLattice) -> list[tuple[int, ...]]:
    """Maps preserving binary meets and the top, i.e. all meets of a finite lattice."""
    n = l.size
    out = []
    for f in itertools.product(range(n), repeat=n):
        if f[l.top] != l.top:
            continue
        if all(f[l.meet[a][b]] == l.meet[f[a]][f[b]] for a in range(n) for b in range(a + 1, n)):
            out.append(f)
    return out


def universale_monoids(l: FiniteLattice) -> list[FiniteLattice]:
    """Every monoid making ``l`` a universale.

    Each row ``x -> a.x`` and each column ``x -> x.a`` must preserve all meets,
    so rows are drawn from the meet-preserving self-maps, then columns and
    associativity are checked.
    """
    n = l.size
    ends = _meet_endomaps(l)
    ends_set = set(ends)
    found = []
    for u in range(n):
        ident = tuple(range(n))
        # row a must send the identity to a
        rows_for = {a: [f for f in ends if f[u] == a] for a in range(n)}
        rows_for[u] = [ident] if ident in rows_for[u] else []
        table: list[tuple[int, ...] | None] = [None] * n

        def rec(k):
            if k == n:
                cols_ok = all(tuple(table[a][x] for a in range(n)) in ends_set for x in range(n))
                if cols_ok and all(table[table[a][b]][c] == table[a][table[b][c]]
                                   for a in range(n) for b in range(n) for c in range(n)):
                    found.append(l.with_monoid([list(r) for r in table], u))
                return
            a = k
            for f in rows_for[a]:
                # columns preserve meets, hence order: prune rows breaking that early
                if all(l.leq(table[b][x], f[x]) if l.leq(b, a) else
                       (not l.leq(a, b) or l.leq(f[x], table[b][x]))
                       for b in range(k) for x in range(n)):
                    table[a] = f
                    rec(k + 1)
                    table[a] = None

        rec(0)
    return found


def scan_small_universales(max_size: int = 5) -> Report:
    """Run the universale laws and their consequences on every small model."""
    rep = Report("universale-scan")
    lattices = small_lattices(max_size)
    models = 0
    with rep.timed():
        for idx, l in enumerate(lattices):
            for m in universale_monoids(l):
                models += 1
                law = check_universale(m)
                if not law.passed:
                    rep.fail(lattice=idx, problem="search produced a non-universale",
                             monoid=[list(r) for r in m.monoid])
                    continue
                th = check_universale_theorems(m)
                rep.checked += th.checked
                for cx in th.counterexamples:
                    rep.fail(lattice=idx, size=m.size, identity=m.elements[m.identity], **cx)
    rep.data.update(lattices=len(lattices), models=models)
    return rep


# sheaves through order reversal


@dataclass
class DualPresheaf:
    """Presheaf on the open sets: sections per open, restrictions from larger to smaller.

    ``restrictions[(u1, u2)]`` for an open covering pair ``u1 < u2`` maps
    sections over ``u2`` to sections over ``u1`` (indices).
    """

    space: FiniteSpace
    sections: Mapping[PointSet, tuple[str, ...]]
    restrictions: Mapping[tuple[PointSet, PointSet], tuple[int, ...]]

    def to_conciliation(self) -> PreConciliation:
        """Complements turn opens into closed sets and restrictions into mediations."""
        sp = self.space
        full = sp.full
        carriers = {full & ~u: tuple(s) for u, s in self.sections.items()}
        edges = {}
        for (u1, u2), m in self.restrictions.items():
            edges[(full & ~u2, full & ~u1)] = tuple(m)
        return PreConciliation(sp, carriers, edges)

    @classmethod
    def from_conciliation(cls, g: PreConciliation) -> DualPresheaf:
        sp = g.space
        full = sp.full
        sections = {full & ~w: g.carriers[w] for w in sp.closeds}
        restrictions = {(full & ~w2, full & ~w1): g.edges[(w1, w2)] for w1, w2 in sp.covering_pairs}
        return cls(sp, sections, restrictions)


def _as_opens(sp: FiniteSpace, cx: dict) -> dict:
    full = sp.full
    out = {}
    for k, v in cx.items():
        if k == "W":
            out["U"] = sp.names(full & ~sp.mask(v))
        elif k == "family":
            out["cover"] = [sp.names(full & ~sp.mask(s)) for s in v]
        else:
            out[k] = v
    return out


def check_sheaf_by_duality(f: DualPresheaf, max_family: int | None = None) -> Report:
    """Separation and unique gluing over every finite open cover, via the conciliation engine.

    Covers of every open set, the whole space included, are checked; the
    empty cover of the empty set is not.
    """
    g = f.to_conciliation()
    sp = g.space
    sep = check_unified(g, JOINT, include_empty=True)
    glue = check_conciliation(g, max_family, include_empty=True)
    rep = Report("sheaf")
    rep.checked = sep.checked + glue.checked
    for cx in sep.counterexamples:
        rep.fail(check="separated", **_as_opens(sp, cx))
    for cx in glue.counterexamples:
        rep.fail(check="gluing", **_as_opens(sp, cx))
    rep.suppressed += sep.suppressed + glue.suppressed
    rep.data.update(separated=sep.passed, sheaf=sep.passed and glue.passed,
                    covers=glue.data.get("co_coverings", 0))
    return rep
