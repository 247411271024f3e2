"""Brouwer algebra of closed sets, Heyting algebra of open sets, and a
propositional evaluator over either."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ModeMismatch, NotInZFamily, UnboundAtom
from .report import Report
from .topology import FiniteSpace, PointSet, closure, complement, interior

CLOSED = "closed"
OPEN = "open"


def pseudo_difference(space: FiniteSpace, z: PointSet, w: PointSet) -> PointSet:
    """``z`` minus ``w`` in the co-Heyting sense: the least closed ``c`` with ``z <= w | c``.

    This is the closure of ``z - w``. It is contained in, and often smaller
    than, ``z & ~w`` (see :func:`meet_with_negation`); only the former is
    adjoint to the union.
    """
    space.require_closed(z, "z")
    space.require_closed(w, "w")
    return closure(space, z & ~w)


def meet_with_negation(space: FiniteSpace, z: PointSet, w: PointSet) -> PointSet:
    """``z & ~w``, which agrees with the pseudo-difference when ``z`` is the whole space."""
    space.require_closed(z, "z")
    space.require_closed(w, "w")
    return closure(space, complement(space, w)) & z


def relative_pseudo_difference(space: FiniteSpace, w_i: PointSet, z: PointSet,
                               w: PointSet) -> PointSet:
    """Pseudo-difference inside the algebra of closed supersets of ``w_i``."""
    space.require_closed(w_i, "w_i")
    space.require_closed(z, "z")
    space.require_closed(w, "w")
    if z & w_i != w_i or w & w_i != w_i:
        raise NotInZFamily(f"arguments must contain {space.format(w_i)}")
    return closure(space, z & ~w) | w_i


def paraconsistent_negation(space: FiniteSpace, w: PointSet) -> PointSet:
    space.require_closed(w)
    return closure(space, complement(space, w))


def boundary(space: FiniteSpace, w: PointSet) -> PointSet:
    """``w & ~w``: nonempty exactly on the topological border of ``w``."""
    space.require_closed(w)
    return w & closure(space, complement(space, w))


def heyting_implication(space: FiniteSpace, u: PointSet, v: PointSet) -> PointSet:
    space.require_open(u, "u")
    space.require_open(v, "v")
    return interior(space, complement(space, u)) | v


# Proposition syntax tree


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Not:
    arg: "Proposition"


@dataclass(frozen=True)
class Boundary:
    arg: "Proposition"


@dataclass(frozen=True)
class And:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Or:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Diff:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Implies:
    left: "Proposition"
    right: "Proposition"


Proposition = Union[Atom, Top, Bottom, Not, Boundary, And, Or, Diff, Implies]

CLOSED_ONLY = (Not, Boundary, Diff)
OPEN_ONLY = (Implies,)


def atoms(p: Proposition) -> list[str]:
    """Atom names in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(q):
        if isinstance(q, Atom):
            seen.setdefault(q.name)
        elif isinstance(q, (Not, Boundary)):
            walk(q.arg)
        elif isinstance(q, (And, Or, Diff, Implies)):
            walk(q.left)
            walk(q.right)

    walk(p)
    return list(seen)


@dataclass(frozen=True)
class Valuation:
    bindings: Mapping[str, PointSet]
    mode: str = CLOSED

    def __post_init__(self):
        if self.mode not in (CLOSED, OPEN):
            raise ValueError(f"mode must be {CLOSED!r} or {OPEN!r}")

    def validate(self, space: FiniteSpace) -> None:
        for name, s in self.bindings.items():
            if self.mode == CLOSED:
                space.require_closed(s, f"value of {name}")
            else:
                space.require_open(s, f"value of {name}")


def eval_proposition(space: FiniteSpace, p: Proposition, val: Valuation) -> PointSet:
    val.validate(space)
    closed_mode = val.mode == CLOSED

    def ev(q) -> PointSet:
        if isinstance(q, Atom):
            try:
                return val.bindings[q.name]
            except KeyError:
                raise UnboundAtom(f"atom {q.name!r} has no value") from None
        if isinstance(q, Top):
            return space.full
        if isinstance(q, Bottom):
            return 0
        if closed_mode and isinstance(q, OPEN_ONLY):
            raise ModeMismatch("implication is only available over open sets")
        if not closed_mode and isinstance(q, CLOSED_ONLY):
            raise ModeMismatch(f"{type(q).__name__} is only available over closed sets")
        if isinstance(q, And):
            return ev(q.left) & ev(q.right)
        if isinstance(q, Or):
            return ev(q.left) | ev(q.right)
        if isinstance(q, Not):
            return paraconsistent_negation(space, ev(q.arg))
        if isinstance(q, Boundary):
            return boundary(space, ev(q.arg))
        if isinstance(q, Diff):
            return pseudo_difference(space, ev(q.left), ev(q.right))
        if isinstance(q, Implies):
            return heyting_implication(space, ev(q.left), ev(q.right))
        raise TypeError(f"not a proposition: {q!r}")

    return ev(p)


def truth_table(space: FiniteSpace, p: Proposition, names: list[str] | None = None,
                mode: str = CLOSED) -> list[tuple[dict[str, PointSet], PointSet]]:
    """Value of ``p`` under every assignment of closed (or open) sets to ``names``."""
    names = atoms(p) if names is None else names
    family = space.closeds if mode == CLOSED else space.opens
    rows = []

    def rec(i, acc):
        if i == len(names):
            rows.append((dict(acc), eval_proposition(space, p, Valuation(acc, mode))))
            return
        for s in family:
            acc[names[i]] = s
            rec(i + 1, acc)
        del acc[names[i]]

    rec(0, {})
    return rows


# exhaustive law checks


def check_brouwer_adjunction(space: FiniteSpace) -> Report:
    """``(a - b) <= c  iff  a <= b | c`` for every closed triple."""
    rep = Report("brouwer-adjunction")
    with rep.timed():
        fer = space.closeds
        for a in fer:
            for b in fer:
                d = closure(space, a & ~b)
                for c in fer:
                    rep.checked += 1
                    lhs = d & ~c == 0
                    rhs = a & ~(b | c) == 0
                    if lhs != rhs:
                        rep.fail(a=space.names(a), b=space.names(b), c=space.names(c),
                                 difference=space.names(d))
    return rep


def check_relative_adjunction(space: FiniteSpace) -> Report:
    """Adjunction and closure of the relative pseudo-difference on every Z(w_i)."""
    rep = Report("relative-adjunction")
    with rep.timed():
        for wi in space.closeds:
            fam = space.closed_supersets(wi)
            for z in fam:
                for w in fam:
                    d = relative_pseudo_difference(space, wi, z, w)
                    if d & wi != wi or not space.is_closed(d):
                        rep.fail(w_i=space.names(wi), z=space.names(z), w=space.names(w),
                                 result=space.names(d), problem="escapes Z(w_i)")
                    for t in fam:
                        rep.checked += 1
                        if (d & ~t == 0) != (z & ~(w | t) == 0):
                            rep.fail(w_i=space.names(wi), z=space.names(z), w=space.names(w),
                                     t=space.names(t))
    return rep


def check_excluded_middle(space: FiniteSpace) -> Report:
    rep = Report("excluded-middle")
    for w in space.closeds:
        rep.checked += 1
        if w | paraconsistent_negation(space, w) != space.full:
            rep.fail(w=space.names(w))
    contradictions = [w for w in space.closeds if boundary(space, w)]
    rep.data["non_contradiction_failures"] = len(contradictions)
    return rep


def check_leibniz(space: FiniteSpace) -> Report:
    """``bd(p & q) == (bd p & q) | (p & bd q)`` for every closed pair."""
    rep = Report("leibniz")
    with rep.timed():
        bd = {w: boundary(space, w) for w in space.closeds}
        for p in space.closeds:
            for q in space.closeds:
                rep.checked += 1
                lhs = boundary(space, p & q)
                rhs = (bd[p] & q) | (p & bd[q])
                if lhs != rhs:
                    rep.fail(p=space.names(p), q=space.names(q), lhs=space.names(lhs),
                             rhs=space.names(rhs))
    return rep


def check_mediation_commutation(space: FiniteSpace) -> Report:
    """Z-conciliation mediations preserve the relative pseudo-difference."""
    rep = Report("mediation-commutation")
    with rep.timed():
        for wi in space.closeds:
            fam = space.closed_supersets(wi)
            for wj in fam:
                for z in fam:
                    for w in fam:
                        rep.checked += 1
                        lhs = relative_pseudo_difference(space, wi, z, w) | wj
                        rhs = relative_pseudo_difference(space, wj, z | wj, w | wj)
                        if lhs != rhs:
                            rep.fail(w_i=space.names(wi), w_j=space.names(wj),
                                     z=space.names(z), w=space.names(w),
                                     lhs=space.names(lhs), rhs=space.names(rhs))
    return rep
