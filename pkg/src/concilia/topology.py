"""Finite topological spaces with bitmask point sets.

A point set is a plain ``int`` whose bit ``i`` marks membership of the
``i``-th point of its space. All set algebra is integer bit arithmetic;
names only appear when rendering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    MissingEmptyOrFull,
    NotClosed,
    NotClosedUnderIntersection,
    NotClosedUnderUnion,
    NotOpen,
    TooLarge,
    UnknownPoint,
)

PointSet = int

MAX_ENUMERATION_POINTS = 4
# co-covering enumeration is exhaustive by default only up to this many closed sets
UNBOUNDED_FAMILY_LIMIT = 16


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int) -> Iterable[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def set_key(mask: int) -> tuple[int, int]:
    """Canonical ordering of point sets: by size, then by bit pattern."""
    return (popcount(mask), mask)


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    opens: tuple[PointSet, ...]
    closeds: tuple[PointSet, ...] = field(init=False)

    def __post_init__(self):
        full = self.full
        object.__setattr__(self, "opens", tuple(sorted(set(self.opens), key=set_key)))
        closeds = {full & ~u for u in self.opens}
        object.__setattr__(self, "closeds", tuple(sorted(closeds, key=set_key)))

    def __repr__(self):
        opens = ", ".join(self.format(u) for u in self.opens)
        return f"FiniteSpace(points={' '.join(self.points)}; opens={opens})"

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> PointSet:
        return (1 << len(self.points)) - 1

    @cached_property
    def closed_set(self) -> frozenset[PointSet]:
        return frozenset(self.closeds)

    @cached_property
    def open_set(self) -> frozenset[PointSet]:
        return frozenset(self.opens)

    @cached_property
    def point_closure(self) -> tuple[PointSet, ...]:
        # smallest closed set containing each point; closure distributes over
        # finite unions, so these determine every closure
        out = []
        for i in range(self.n):
            bit = 1 << i
            c = self.full
            for w in self.closeds:
                if w & bit:
                    c &= w
            out.append(c)
        return tuple(out)

    @cached_property
    def point_copoint(self) -> tuple[PointSet, ...]:
        """Largest closed set avoiding each point (complement of its minimal open)."""
        out = []
        for i in range(self.n):
            bit = 1 << i
            c = 0
            for w in self.closeds:
                if not w & bit:
                    c |= w
            out.append(c)
        return tuple(out)

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def is_closed(self, s: PointSet) -> bool:
        return s in self.closed_set

    def is_open(self, s: PointSet) -> bool:
        return s in self.open_set

    def require_closed(self, s: PointSet, what: str = "set") -> None:
        self.require_subset(s)
        if s not in self.closed_set:
            raise NotClosed(f"{what} {self.format(s)} is not closed")

    def require_open(self, s: PointSet, what: str = "set") -> None:
        self.require_subset(s)
        if s not in self.open_set:
            raise NotOpen(f"{what} {self.format(s)} is not open")

    def require_subset(self, s: PointSet) -> None:
        if s < 0 or s & ~self.full:
            raise UnknownPoint(f"set {s:#b} has members outside the {self.n} points")

    def mask(self, names: Iterable[str]) -> PointSet:
        m = 0
        for name in names:
            try:
                m |= 1 << self.index[name]
            except KeyError:
                raise UnknownPoint(f"unknown point {name!r}") from None
        return m

    def names(self, s: PointSet) -> list[str]:
        """Members of ``s`` as a name-sorted list (the rendering used in reports)."""
        return sorted(self.points[i] for i in iter_bits(s))

    def format(self, s: PointSet) -> str:
        return "{" + " ".join(self.points[i] for i in iter_bits(s)) + "}"

    def closed_supersets(self, w: PointSet) -> list[PointSet]:
        return [z for z in self.closeds if z & w == w]

    def upper_covers(self, w: PointSet) -> list[PointSet]:
        """Closed sets strictly above ``w`` with nothing closed strictly between."""
        above = [z for z in self.closeds if z != w and z & w == w]
        return [z for z in above if not any(y != z and y & z == y for y in above)]

    @cached_property
    def covering_pairs(self) -> tuple[tuple[PointSet, PointSet], ...]:
        """Hasse edges (w1, w2), w1 covered by w2, of the closed-set poset."""
        return tuple((w, z) for w in self.closeds for z in self.upper_covers(w))

    @cached_property
    def open_covering_pairs(self) -> tuple[tuple[PointSet, PointSet], ...]:
        """Hasse edges (u1, u2), u1 covered by u2, of the open-set poset."""
        full = self.full
        return tuple(sorted(((full & ~b, full & ~a) for a, b in self.covering_pairs),
                            key=lambda e: (set_key(e[0]), set_key(e[1]))))


def build_space(point_names: Sequence[str], opens: Iterable[Iterable[str]]) -> FiniteSpace:
    names = tuple(point_names)
    if len(set(names)) != len(names):
        dup = sorted({p for p in names if names.count(p) > 1})
        raise UnknownPoint(f"duplicate point names {dup}")
    index = {p: i for i, p in enumerate(names)}
    masks = set()
    for members in opens:
        m = 0
        for p in members:
            if p not in index:
                raise UnknownPoint(f"open set mentions unknown point {p!r}")
            m |= 1 << index[p]
        masks.add(m)
    return space_from_masks(names, masks)


def space_from_masks(names: Sequence[str], opens: Iterable[PointSet]) -> FiniteSpace:
    names = tuple(names)
    full = (1 << len(names)) - 1
    family = set(opens)
    for u in family:
        if u < 0 or u & ~full:
            raise UnknownPoint(f"open set {u:#b} has members outside the {len(names)} points")
    if 0 not in family or full not in family:
        raise MissingEmptyOrFull("the empty set and the whole space must both be open")
    ordered = sorted(family, key=set_key)

    def fmt(m):
        return "{" + " ".join(names[i] for i in iter_bits(m)) + "}"

    for a, b in itertools.combinations(ordered, 2):
        if a | b not in family:
            raise NotClosedUnderUnion(f"union of opens {fmt(a)} and {fmt(b)} is not open", (a, b))
        if a & b not in family:
            raise NotClosedUnderIntersection(
                f"intersection of opens {fmt(a)} and {fmt(b)} is not open", (a, b))
    return FiniteSpace(names, tuple(ordered))


def closure(space: FiniteSpace, s: PointSet) -> PointSet:
    space.require_subset(s)
    c = 0
    for i in iter_bits(s):
        c |= space.point_closure[i]
    return c


def complement(space: FiniteSpace, s: PointSet) -> PointSet:
    space.require_subset(s)
    return space.full & ~s


def interior(space: FiniteSpace, s: PointSet) -> PointSet:
    return complement(space, closure(space, complement(space, s)))


@dataclass(frozen=True)
class CoCovering:
    target: PointSet
    members: tuple[PointSet, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a co-covering needs at least one member")
        meet = -1
        for m in self.members:
            meet &= m
        if meet != self.target:
            raise ValueError("members do not intersect to the target")


def co_coverings(space: FiniteSpace, w: PointSet, max_size: int | None = None) -> list[CoCovering]:
    """All families of at most ``max_size`` distinct closed sets meeting exactly in ``w``."""
    space.require_closed(w)
    cands = space.closed_supersets(w)
    if max_size is None:
        if len(space.closeds) > UNBOUNDED_FAMILY_LIMIT:
            raise TooLarge(f"{len(space.closeds)} closed sets; pass max_size explicitly")
        max_size = len(cands)
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    return [CoCovering(w, fam) for fam in _families(cands, w, max_size)]


def _families(cands: list[PointSet], w: PointSet, max_size: int):
    # depth-first over index-increasing subsets; yields those meeting in w
    n = len(cands)
    full_meet = -1

    def rec(start, chosen, meet):
        if chosen and meet == w:
            yield tuple(chosen)
        if len(chosen) == max_size:
            return
        for i in range(start, n):
            chosen.append(cands[i])
            yield from rec(i + 1, chosen, meet & cands[i])
            chosen.pop()

    yield from rec(0, [], full_meet)


def enumerate_spaces(n: int, allow_large: bool = False) -> list[FiniteSpace]:
    """Every topology on ``n`` labeled points, in canonical order.

    Topologies on a finite set correspond to preorders; opens are the
    up-sets of the specialization preorder.
    """
    if n < 1:
        raise ValueError("need at least one point")
    if n > MAX_ENUMERATION_POINTS and not allow_large:
        raise TooLarge(f"refusing to enumerate topologies on {n} > {MAX_ENUMERATION_POINTS} points")
    names = tuple(str(i + 1) for i in range(n))
    off_diag = [(i, j) for i in range(n) for j in range(n) if i != j]
    spaces = []
    for bits in range(1 << len(off_diag)):
        le = [[i == j for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(off_diag):
            if bits >> k & 1:
                le[i][j] = True
        if not all(le[i][k] or not (le[i][j] and le[j][k])
                   for i in range(n) for j in range(n) for k in range(n)):
            continue
        opens = [u for u in range(1 << n)
                 if all(not (u >> i & 1) or (u >> j & 1)
                        for i in range(n) for j in range(n) if le[i][j])]
        spaces.append(FiniteSpace(names, tuple(opens)))
    spaces.sort(key=lambda s: s.opens)
    return spaces


def discrete_space(names: Sequence[str]) -> FiniteSpace:
    return FiniteSpace(tuple(names), tuple(range(1 << len(names))))


def indiscrete_space(names: Sequence[str]) -> FiniteSpace:
    return FiniteSpace(tuple(names), (0, (1 << len(names)) - 1))
