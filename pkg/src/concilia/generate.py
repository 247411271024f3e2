"""Seeded generators of pre-conciliation fixtures.

Every functor on a finite poset is a quotient of a free one, so random
generator sets followed by a random mediation-compatible congruence reach
unified and non-unified examples alike.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .conciliation import PreConciliation, zeta_id
from .topology import FiniteSpace, PointSet, enumerate_spaces, set_key


@lru_cache(maxsize=None)
def spaces_upto(n: int) -> tuple[FiniteSpace, ...]:
    return tuple(sp for k in range(1, n + 1) for sp in enumerate_spaces(k))


def free_preconciliation(space: FiniteSpace, generators: dict[PointSet, int]) -> PreConciliation:
    """``G(W)`` holds one element per generator sitting at a closed subset of ``W``."""
    elems = {}
    for w in space.closeds:
        elems[w] = [(u, k) for u in space.closeds if u & w == u
                    for k in range(generators.get(u, 0))]
    carriers = {w: tuple(f"{k}@{zeta_id(space, u)}" for u, k in es) for w, es in elems.items()}
    edges = {}
    for w1, w2 in space.covering_pairs:
        pos = {e: i for i, e in enumerate(elems[w2])}
        edges[(w1, w2)] = tuple(pos[e] for e in elems[w1])
    return PreConciliation(space, carriers, edges)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def quotient_by_congruence(g: PreConciliation,
                           merges: list[tuple[PointSet, int, int]]) -> PreConciliation:
    """Identify the given element pairs and everything their mediations force."""
    sp = g.space
    uf = {w: _UnionFind(g.size(w)) for w in sp.closeds}
    for w, a, b in merges:
        uf[w].union(a, b)
    # covers are strictly larger, so one pass in increasing size reaches a fixpoint
    for w in sorted(sp.closeds, key=set_key):
        n = g.size(w)
        for v in sp.upper_covers(w):
            m = g.edges[(w, v)]
            for a in range(n):
                r = uf[w].find(a)
                if r != a:
                    uf[v].union(m[a], m[r])
    reps = {w: sorted({uf[w].find(a) for a in range(g.size(w))}) for w in sp.closeds}
    pos = {w: {r: i for i, r in enumerate(rs)} for w, rs in reps.items()}
    carriers = {w: tuple(g.carriers[w][r] for r in rs) for w, rs in reps.items()}
    edges = {}
    for (w1, w2), m in g.edges.items():
        edges[(w1, w2)] = tuple(pos[w2][uf[w2].find(m[r])] for r in reps[w1])
    return PreConciliation(sp, carriers, edges)


def random_preconciliation(seed: int, max_points: int = 4) -> PreConciliation:
    rng = random.Random(seed)
    n = rng.choice([k for k in (1, 2, 3, 3, 3, 4) if k <= max_points])
    space = rng.choice(enumerate_spaces(n))
    gens = {w: rng.choice((0, 0, 0, 1, 1, 2)) for w in space.closeds}
    if not any(gens.values()):
        gens[rng.choice(space.closeds)] = 1
    # two incomparable supersets meeting exactly in a nonempty W
    splits = [(w, v1, v2) for w in space.closeds if w
              for v1 in space.closed_supersets(w) for v2 in space.closed_supersets(w)
              if w != v1 and w != v2 and v1 < v2 and v1 & v2 == w]
    split = rng.choice(splits) if splits and rng.random() < 0.4 else None
    if split:
        gens[split[0]] = max(gens[split[0]], 2)
    g = free_preconciliation(space, gens)
    merges = []
    for _ in range(rng.randint(0, 6)):
        w = rng.choice(space.closeds)
        if g.size(w) >= 2:
            a, b = rng.sample(range(g.size(w)), 2)
            merges.append((w, a, b))
    if split:
        # collapsing one pair on both supersets breaks joint separation at W
        w, v1, v2 = split
        a, b = rng.sample(range(g.size(w)), 2)
        for v in (v1, v2):
            m = g.med(w, v)
            merges.append((v, m[a], m[b]))
    return quotient_by_congruence(g, merges)
