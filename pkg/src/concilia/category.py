"""Morphisms, products, subobjects and the subobject classifier among
conciliations over one space."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .conciliation import PreConciliation, check_conciliation, check_unified, zeta_id
from .errors import NotClassifiable, NotSubobject, TooLarge
from .report import Report
from .topology import FiniteSpace, PointSet, set_key

# brute-force morphism enumeration guard
MAX_ENUM_CARRIER = 4
MAX_ENUM_CLOSEDS = 8


@dataclass(frozen=True)
class Morphism:
    source: PreConciliation
    target: PreConciliation
    components: Mapping[PointSet, tuple[int, ...]]

    @classmethod
    def from_ids(cls, source, target, components: Mapping[PointSet, Mapping[str, str]]):
        comps = {}
        for w in source.space.closeds:
            fn = components[w]
            comps[w] = tuple(target.index_of(w, fn[e]) for e in source.carriers[w])
        return cls(source, target, comps)

    def apply(self, w: PointSet, elem: str) -> str:
        return self.target.carriers[w][self.components[w][self.source.index_of(w, elem)]]

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source is other.source and self.target is other.target
                and dict(self.components) == dict(other.components))

    def __hash__(self):
        return hash(tuple(sorted(self.components.items())))


def check_morphism(m: Morphism) -> Report:
    """Naturality on every covering pair (hence on every inclusion)."""
    rep = Report("morphism")
    g, h = m.source, m.target
    sp = g.space
    if h.space != sp:
        rep.fail(problem="source and target live over different spaces")
        return rep
    for w in sp.closeds:
        comp = m.components.get(w)
        if comp is None or len(comp) != g.size(w) or any(not 0 <= v < h.size(w) for v in comp):
            rep.fail(W=sp.names(w), problem="component is not a total function")
    if not rep.passed:
        return rep
    for w1, w2 in sp.covering_pairs:
        mg, mh = g.med(w1, w2), h.med(w1, w2)
        c1, c2 = m.components[w1], m.components[w2]
        for t in range(g.size(w1)):
            rep.checked += 1
            up_then_map = c2[mg[t]]
            map_then_up = mh[c1[t]]
            if up_then_map != map_then_up:
                rep.fail(W1=sp.names(w1), W2=sp.names(w2), element=g.carriers[w1][t],
                         via_source=h.carriers[w2][up_then_map],
                         via_target=h.carriers[w2][map_then_up])
    return rep


def identity(g: PreConciliation) -> Morphism:
    return Morphism(g, g, {w: tuple(range(g.size(w))) for w in g.space.closeds})


def compose(second: Morphism, first: Morphism) -> Morphism:
    """``second`` after ``first``."""
    if first.target != second.source:
        raise ValueError("morphisms are not composable")
    comps = {w: tuple(second.components[w][v] for v in first.components[w])
             for w in first.source.space.closeds}
    return Morphism(first.source, second.target, comps)


def to_terminal(g: PreConciliation, terminal: PreConciliation) -> Morphism:
    return Morphism(g, terminal, {w: (0,) * g.size(w) for w in g.space.closeds})


def enumerate_morphisms(g: PreConciliation, h: PreConciliation) -> Iterator[Morphism]:
    """Every natural transformation ``g -> h`` by pruned brute force."""
    sp = g.space
    if len(sp.closeds) > MAX_ENUM_CLOSEDS or any(
            max(g.size(w), h.size(w)) > MAX_ENUM_CARRIER for w in sp.closeds):
        raise TooLarge("morphism enumeration is capped at carrier size "
                       f"{MAX_ENUM_CARRIER} and {MAX_ENUM_CLOSEDS} closed sets")
    order = sorted(sp.closeds, key=set_key)
    below = {w: [v for v, u in sp.covering_pairs if u == w] for w in order}
    chosen: dict[PointSet, tuple[int, ...]] = {}

    def rec(k):
        if k == len(order):
            yield Morphism(g, h, dict(chosen))
            return
        w = order[k]
        for comp in itertools.product(range(h.size(w)), repeat=g.size(w)):
            if all(comp[g.med(v, w)[t]] == h.med(v, w)[chosen[v][t]]
                   for v in below[w] for t in range(g.size(v))):
                chosen[w] = comp
                yield from rec(k + 1)
                del chosen[w]

    yield from rec(0)


# products


def product(g1: PreConciliation, g2: PreConciliation) -> PreConciliation:
    if g1.space != g2.space:
        raise ValueError("factors live over different spaces")
    sp = g1.space
    carriers = {w: tuple(f"({a},{b})" for a in g1.carriers[w] for b in g2.carriers[w])
                for w in sp.closeds}
    edges = {}
    for w1, w2 in sp.covering_pairs:
        m1, m2 = g1.med(w1, w2), g2.med(w1, w2)
        n2 = g2.size(w2)
        edges[(w1, w2)] = tuple(m1[a] * n2 + m2[b]
                                for a in range(g1.size(w1)) for b in range(g2.size(w1)))
    return PreConciliation(sp, carriers, edges)


def projections(g1: PreConciliation, g2: PreConciliation,
                p: PreConciliation) -> tuple[Morphism, Morphism]:
    sp = g1.space
    left, right = {}, {}
    for w in sp.closeds:
        n2 = g2.size(w)
        left[w] = tuple(k // n2 for k in range(p.size(w)))
        right[w] = tuple(k % n2 for k in range(p.size(w)))
    return Morphism(p, g1, left), Morphism(p, g2, right)


def pairing(f1: Morphism, f2: Morphism, p: PreConciliation) -> Morphism:
    """The morphism into the product induced by two morphisms into its factors."""
    k = f1.source
    comps = {}
    for w in k.space.closeds:
        n2 = f2.target.size(w)
        comps[w] = tuple(a * n2 + b for a, b in zip(f1.components[w], f2.components[w]))
    return Morphism(k, p, comps)


# subobjects and the classifier


def is_subconciliation(gp: PreConciliation, g: PreConciliation,
                       max_family: int | None = None) -> Report:
    """Carrier inclusion, mediation compatibility, and the conciliation axioms for ``gp``."""
    rep = Report("subconciliation")
    sp = g.space
    if gp.space != sp:
        rep.fail(problem="different spaces")
        return rep
    for w in sp.closeds:
        missing = [e for e in gp.carriers[w] if e not in g._ids[w]]
        for e in missing:
            rep.fail(W=sp.names(w), element=e, problem="not in the ambient carrier")
    if not rep.passed:
        return rep
    for w1, w2 in sp.covering_pairs:
        for e in gp.carriers[w1]:
            rep.checked += 1
            image = g.push(w1, w2, e)
            if image not in gp._ids[w2]:
                rep.fail(W1=sp.names(w1), W2=sp.names(w2), element=e, image=image,
                         problem="escapes the subcarrier")
            elif gp.push(w1, w2, e) != image:
                rep.fail(W1=sp.names(w1), W2=sp.names(w2), element=e, image=image,
                         sub_image=gp.push(w1, w2, e), problem="mediations differ")
    rep.merge(check_unified(gp), "unified")
    rep.merge(check_conciliation(gp, max_family), "conciliation")
    return rep


def inclusion(gp: PreConciliation, g: PreConciliation) -> Morphism:
    comps = {w: tuple(g.index_of(w, e) for e in gp.carriers[w]) for w in g.space.closeds}
    return Morphism(gp, g, comps)


def classifying_family(gp: PreConciliation, g: PreConciliation, w_i: PointSet,
                       t: str) -> list[PointSet]:
    """Closed supersets of ``w_i`` into which ``t`` mediates inside the subobject."""
    return [z for z in g.space.closed_supersets(w_i) if g.push(w_i, z, t) in gp._ids[z]]


def classify(gp: PreConciliation, g: PreConciliation, w_i: PointSet, t: str) -> PointSet:
    """Least closed superset of ``w_i`` where ``t`` enters the subobject."""
    sp = g.space
    sp.require_closed(w_i)
    g.index_of(w_i, t)
    fam = classifying_family(gp, g, w_i, t)
    if not fam:
        raise NotClassifiable(f"{t!r} never enters the subobject, not even over the whole space")
    meet = -1
    for z in fam:
        meet &= z
    return meet


def check_classifier_diagram(gp: PreConciliation, g: PreConciliation) -> Report:
    """The classifying map sends exactly the subobject's elements to the bottom of Z(W)."""
    rep = Report("classifier")
    sp = g.space
    for w in sp.closeds:
        for t in g.carriers[w]:
            rep.checked += 1
            inside = t in gp._ids[w]
            fam = classifying_family(gp, g, w, t)
            if not fam:
                rep.fail(W=sp.names(w), element=t, problem="not classifiable")
                continue
            z = classify(gp, g, w, t)
            if z not in fam:
                rep.fail(W=sp.names(w), element=t, psi=sp.names(z),
                         problem="intersection of the classifying family is not in it")
            if z & w != w:
                rep.fail(W=sp.names(w), element=t, psi=sp.names(z), problem="psi escapes Z(W)")
            if inside and z != w:
                rep.fail(W=sp.names(w), element=t, psi=sp.names(z),
                         problem="element of the subobject not sent to W")
            if not inside and z == w:
                rep.fail(W=sp.names(w), element=t, psi=sp.names(z),
                         problem="element outside the subobject sent to W")
    return rep


def make_Z_prime(space: FiniteSpace, f: PointSet) -> PreConciliation:
    """Subconciliation of Z keeping the closed sets that contain ``f``."""
    space.require_closed(f)
    carriers, edges, pos = {}, {}, {}
    for w in space.closeds:
        sup = [z for z in space.closed_supersets(w) if z & f == f]
        carriers[w] = tuple(zeta_id(space, z) for z in sup)
        pos[w] = {z: i for i, z in enumerate(sup)}
    for w1, w2 in space.covering_pairs:
        edges[(w1, w2)] = tuple(pos[w2][z | w2] for z in pos[w1])
    return PreConciliation(space, carriers, edges)


def check_subobject_data(gp: PreConciliation, g: PreConciliation) -> None:
    rep = is_subconciliation(gp, g)
    if not rep.passed:
        raise NotSubobject(f"not a subconciliation: {rep.counterexamples[0]}")
