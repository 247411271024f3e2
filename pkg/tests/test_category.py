import itertools

import pytest

from concilia.category import (Morphism, check_classifier_diagram, check_morphism,
                               check_subobject_data, classify, compose, enumerate_morphisms,
                               identity, inclusion, is_subconciliation, make_Z_prime, pairing,
                               product, projections, to_terminal)
from concilia.conciliation import (build_preconciliation, is_conciliation, make_constant,
                                   make_terminal, make_Z_conciliation, zeta_value)
from concilia.errors import NotClassifiable, NotSubobject, TooLarge
from concilia.generate import random_preconciliation, spaces_upto
from concilia.topology import build_space


@pytest.fixture
def p3():
    return build_space("123", [[], ["1"], ["3"], ["1", "3"], ["1", "2", "3"]])


def test_identity_and_terminal_maps(p3):
    z = make_Z_conciliation(p3)
    assert check_morphism(identity(z)).passed
    one = make_terminal(p3)
    bang = to_terminal(z, one)
    assert check_morphism(bang).passed
    c = make_constant(p3, "ab")
    assert list(enumerate_morphisms(c, one)) == [to_terminal(c, one)]


def test_permuted_component_fails(p3):
    c = make_constant(p3, ["0", "1"])
    comps = {w: (0, 1) for w in p3.closeds}
    comps[p3.mask("2")] = (1, 0)
    rep = check_morphism(Morphism(c, c, comps))
    assert not rep.passed
    assert {"W1", "W2", "element"} <= set(rep.counterexamples[0])


def test_non_total_component(p3):
    c = make_constant(p3, ["0", "1"])
    rep = check_morphism(Morphism(c, c, {w: (0,) for w in p3.closeds}))
    assert not rep.passed


def test_compose(p3):
    c = make_constant(p3, ["0", "1"])
    swap = Morphism(c, c, {w: (1, 0) for w in p3.closeds})
    assert check_morphism(swap).passed
    assert compose(swap, swap) == identity(c)
    with pytest.raises(ValueError):
        compose(swap, to_terminal(c, make_terminal(p3)))


def test_morphisms_between_constants(p3):
    # natural maps between constant functors are the constant maps of sets
    ms = list(enumerate_morphisms(make_constant(p3, "ab"), make_constant(p3, "xyz")))
    assert len(ms) == 9
    assert all(check_morphism(m).passed for m in ms)


def test_enumeration_guard():
    sp = build_space("abcd", [[], ["a"], ["b"], ["a", "b"], ["a", "b", "c", "d"]])
    z = make_Z_conciliation(sp)
    with pytest.raises(TooLarge):
        next(enumerate_morphisms(z, z))


@pytest.mark.parametrize("seed", range(0, 40, 4))
def test_terminal_is_terminal(seed):
    g = random_preconciliation(seed, max_points=3)
    one = make_terminal(g.space)
    if max(g.size(w) for w in g.space.closeds) > 4 or len(g.space.closeds) > 8:
        pytest.skip("too large to enumerate")
    assert list(enumerate_morphisms(g, one)) == [to_terminal(g, one)]


def test_product_universal_property(p3):
    a = make_constant(p3, ["0", "1"])
    b = make_terminal(p3)
    p = product(a, b)
    assert is_conciliation(p)
    pl, pr = projections(a, b, p)
    assert check_morphism(pl).passed and check_morphism(pr).passed
    k = make_constant(p3, ["u", "v"])
    for f1 in enumerate_morphisms(k, a):
        for f2 in enumerate_morphisms(k, b):
            h = pairing(f1, f2, p)
            assert check_morphism(h).passed
            assert compose(pl, h) == f1 and compose(pr, h) == f2
            # uniqueness
            others = [m for m in enumerate_morphisms(k, p)
                      if compose(pl, m) == f1 and compose(pr, m) == f2]
            assert others == [h]


def test_product_of_zetas(p3):
    z = make_Z_conciliation(p3)
    p = product(z, z)
    assert p.size(0) == z.size(0) ** 2
    assert is_conciliation(p)


def test_subconciliations(p3):
    z = make_Z_conciliation(p3)
    zp = make_Z_prime(p3, p3.mask("12"))
    assert is_subconciliation(zp, z).passed
    assert is_subconciliation(z, z).passed
    check_subobject_data(zp, z)
    # a subcarrier not closed under mediation
    carriers = {w: z.carrier(w) for w in p3.closeds}
    carriers[p3.mask("12")] = ("{1,2}",)
    carriers[p3.full] = ("{1,2,3}",)
    bad_edges = {}
    for w1, w2 in p3.covering_pairs:
        bad_edges[(w1, w2)] = {e: (z.push(w1, w2, e) if z.push(w1, w2, e) in carriers[w2]
                                   else carriers[w2][0]) for e in carriers[w1]}
    bad = build_preconciliation(p3, carriers, bad_edges)
    rep = is_subconciliation(bad, z)
    assert not rep.passed
    assert any(cx.get("problem") == "escapes the subcarrier" for cx in rep.counterexamples)
    with pytest.raises(NotSubobject):
        check_subobject_data(bad, z)
    assert check_morphism(inclusion(zp, z)).passed


def test_classify_examples(p3):
    z = make_Z_conciliation(p3)
    f = p3.mask("12")
    zp = make_Z_prime(p3, f)
    w2 = p3.mask("2")
    assert classify(zp, z, w2, "{1,2}") == w2
    assert classify(z, z, w2, "{2,3}") == w2
    # {2,3} does not contain F; the least closed z >= {2} with {2,3} | z >= F is {1,2}
    assert classify(zp, z, w2, "{2,3}") == p3.mask("12")
    assert classify(zp, z, w2, "{2}") == p3.mask("12")


def test_not_classifiable(p3):
    c = make_constant(p3, ["0", "1"])
    sub = make_constant(p3, ["0"])
    assert is_subconciliation(sub, c).passed
    with pytest.raises(NotClassifiable):
        classify(sub, c, p3.mask("2"), "1")


def _brute_classify(sp, f, w, t):
    sups = [z for z in sp.closed_supersets(w) if (t | z) & f == f]
    meet = sp.full
    for z in sups:
        meet &= z
    return meet


@pytest.mark.parametrize("sp", spaces_upto(3), ids=repr)
def test_classifier_matches_brute_force(sp):
    z = make_Z_conciliation(sp)
    for f in sp.closeds:
        zp = make_Z_prime(sp, f)
        assert check_classifier_diagram(zp, z).passed
        for w in sp.closeds:
            for k, e in enumerate(z.carrier(w)):
                t = zeta_value(z, w, k)
                assert classify(zp, z, w, e) == _brute_classify(sp, f, w, t)
                assert (classify(zp, z, w, e) == w) == (e in zp.carrier(w))


def test_product_carrier_sizes():
    for sp in spaces_upto(2):
        a, b = make_constant(sp, "ab"), make_constant(sp, "xyz")
        p = product(a, b)
        assert all(p.size(w) == 6 for w in sp.closeds)
        assert set(itertools.chain.from_iterable(p.carriers.values())) >= {"(a,x)", "(b,z)"}
