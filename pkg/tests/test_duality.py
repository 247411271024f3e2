import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles

from concilia.conciliation import (JOINT, check_conciliation,
                                   check_unified, make_constant, make_terminal,
                                   make_Z_conciliation)
from concilia.duality import (DualPresheaf, FiniteLattice, chain, check_globale, check_locale,
                              check_quantale, check_sheaf_by_duality, check_universale,
                              check_universale_theorems, closed_lattice, diamond_m3,
                              lattice_from_order, open_lattice, pentagon_n5,
                              scan_small_universales, small_lattices, universale_monoids)
from concilia.errors import LatticeError, MonoidMissing, TooLarge
from concilia.generate import random_preconciliation, spaces_upto
from concilia.topology import build_space, discrete_space


def boolean(k):
    return lattice_from_order([str(i) for i in range(1 << k)], lambda a, b: a & b == a)


def test_m3_and_n5_fail_both():
    for l in (diamond_m3(), pentagon_n5()):
        g, lo = check_globale(l), check_locale(l)
        assert not g.passed and not lo.passed
        cx = g.counterexamples[0]
        assert {"a", "subset", "lhs", "rhs"} <= set(cx)


def test_distributive_examples():
    for l in (chain(1), chain(2), chain(5), boolean(2), boolean(3)):
        assert check_globale(l).passed and check_locale(l).passed


def test_space_lattices():
    p3 = build_space("123", [[], ["1"], ["3"], ["1", "3"], ["1", "2", "3"]])
    assert closed_lattice(p3).size == 5
    d = discrete_space("ab")
    assert closed_lattice(d).size == 4
    assert check_globale(closed_lattice(p3)).passed
    assert check_locale(open_lattice(p3)).passed


def test_quantale_and_universale():
    l = boolean(2)
    assert check_quantale(l.with_meet_monoid()).passed
    assert check_universale(l.with_join_monoid()).passed
    with pytest.raises(MonoidMissing):
        check_quantale(l)
    with pytest.raises(MonoidMissing):
        check_universale_theorems(l)
    # on a 3-chain, "max with identity 0" is the join; "min" fails the universale law
    c = chain(3)
    assert check_universale(c.with_join_monoid()).passed
    assert not check_universale(c.with_meet_monoid()).passed


def test_closed_lattice_universale_side():
    p3 = build_space("123", [[], ["1"], ["3"], ["1", "3"], ["1", "2", "3"]])
    l = closed_lattice(p3).with_join_monoid()
    assert check_universale(l).passed
    th = check_universale_theorems(l)
    assert th.passed and th.data["idempotent"] and th.data["identity_is_bottom"]
    # join does not distribute over joins of the empty subset (bottom | a != bottom)
    assert not check_quantale(l).passed


def test_theorem_gate_on_identity():
    l = chain(3).with_meet_monoid()
    th = check_universale_theorems(l)
    assert not th.data["identity_is_bottom"]
    assert any("skipped" in n for n in th.notes)


def test_monoid_validation():
    c = chain(2)
    with pytest.raises(LatticeError):
        c.with_monoid(((0, 0), (0, 0)), 1)
    with pytest.raises(LatticeError):
        FiniteLattice(("a", "b"), ((0, 0), (0, 1)), ((0, 1), (1, 0)), 0, 1)


def test_subset_cap():
    with pytest.raises(TooLarge):
        check_globale(chain(17))


def test_order_dual_swaps_laws():
    for l in small_lattices(5):
        assert check_globale(l).passed == check_locale(l.order_dual).passed


def test_small_lattice_count():
    # unlabeled lattices with 1..5 elements: 1, 1, 1, 2, 5
    sizes = [l.size for l in small_lattices(5)]
    assert sorted(sizes) == [1, 2, 3, 4, 4, 5, 5, 5, 5, 5]


def _brute_universales(l):
    n = l.size
    out = set()
    for flat in itertools.product(range(n), repeat=n * n):
        t = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
        units = [u for u in range(n) if all(t[u][a] == a == t[a][u] for a in range(n))]
        if not units:
            continue
        if any(t[t[a][b]][c] != t[a][t[b][c]] for a in range(n) for b in range(n)
               for c in range(n)):
            continue
        ok = True
        for a in range(n):
            for mask in range(1 << n):
                meet = l.top
                left = right = l.top
                for s in range(n):
                    if mask >> s & 1:
                        meet = l.meet[meet][s]
                        left = l.meet[left][t[a][s]]
                        right = l.meet[right][t[s][a]]
                if t[a][meet] != left or t[meet][a] != right:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.add(t)
    return out


@pytest.mark.parametrize("l", small_lattices(3), ids=lambda l: f"size{l.size}")
def test_universale_search_matches_brute_force(l):
    found = {m.monoid for m in universale_monoids(l)}
    assert found == _brute_universales(l)


def test_scan_finds_no_counterexample():
    rep = scan_small_universales(5)
    assert rep.passed
    assert rep.data["lattices"] == 10
    assert rep.data["models"] == 235


# sheaves


def test_presheaf_examples():
    chain_space = build_space("ab", [[], ["a"], ["a", "b"]])
    const = DualPresheaf.from_conciliation(make_constant(chain_space, ["0", "1"]))
    assert check_sheaf_by_duality(const).data["sheaf"]
    one = DualPresheaf.from_conciliation(make_terminal(chain_space))
    assert check_sheaf_by_duality(one).passed
    d = discrete_space("ab")
    full, a, b = d.full, d.mask("a"), d.mask("b")
    sections = {0: ("*",), a: ("x",), b: ("x",), full: ("p", "q")}
    restr = {(a, full): (0, 0), (b, full): (0, 0), (0, a): (0,), (0, b): (0,)}
    blur = DualPresheaf(d, sections, restr)
    rep = check_sheaf_by_duality(blur)
    assert not rep.data["separated"]
    assert rep.counterexamples[0]["check"] == "separated"
    assert "U" in rep.counterexamples[0]
    # two values everywhere but one over the empty set: disjoint pieces cannot be glued
    two = {u: ("0", "1") for u in d.opens}
    two[0] = ("*",)
    restr = {(u, v): (tuple(range(2)) if u else (0, 0)) for u, v in d.open_covering_pairs}
    lonely = DualPresheaf(d, two, restr)
    rep = check_sheaf_by_duality(lonely)
    assert rep.data["separated"] and not rep.data["sheaf"]
    assert oracles.sheaf_verdicts(lonely) == (True, False)
    assert check_sheaf_by_duality(DualPresheaf.from_conciliation(make_constant(d, "01"))).passed


@pytest.mark.parametrize("sp", spaces_upto(3), ids=repr)
def test_sheaf_verdicts_match_direct_check(sp):
    for g in (make_Z_conciliation(sp), make_constant(sp, ["0", "1"]), make_terminal(sp)):
        f = DualPresheaf.from_conciliation(g)
        rep = check_sheaf_by_duality(f)
        assert (rep.data["separated"], rep.data["sheaf"]) == oracles.sheaf_verdicts(f)


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_duality_round_trip(seed):
    g = random_preconciliation(seed, max_points=3)
    f = DualPresheaf.from_conciliation(g)
    assert f.to_conciliation() == g
    rep = check_sheaf_by_duality(f)
    assert rep.data["separated"] == check_unified(g, JOINT, include_empty=True).passed
    assert rep.data["sheaf"] == (check_unified(g, JOINT, include_empty=True).passed and
                                 check_conciliation(g, include_empty=True).passed)
    assert (rep.data["separated"], rep.data["sheaf"]) == oracles.sheaf_verdicts(f)
