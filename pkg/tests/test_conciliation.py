import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concilia.conciliation import (JOINT, STRICT, PreConciliation, agree_exists, associate,
                                   associated_conciliation, build_preconciliation,
                                   check_conciliation, check_unified, comparison_map, glue,
                                   is_conciliation, make_constant, make_terminal,
                                   make_Z_conciliation, treaty, unified_violations,
                                   unified_violations_literal, zeta_id)
from concilia.errors import (AmbiguousGlue, EmptyCarrier, MissingCarrier, MissingEdge, NoGlue,
                             NotMatching, PathDependence, UnknownPoint)
from concilia.generate import random_preconciliation, spaces_upto
from concilia.topology import build_space


@pytest.fixture
def p3():
    return build_space("123", [[], ["1"], ["3"], ["1", "3"], ["1", "2", "3"]])


def test_zeta_carriers(p3):
    z = make_Z_conciliation(p3)
    w2 = p3.mask("2")
    assert z.carrier(w2) == ("{2}", "{1,2}", "{2,3}", "{1,2,3}")
    assert z.carrier(p3.full) == ("{1,2,3}",)
    assert z.push(w2, p3.mask("12"), "{2,3}") == "{1,2,3}"
    assert zeta_id(p3, 0) == "{}"


def test_zeta_is_conciliation_on_small_spaces():
    for sp in spaces_upto(3):
        z = make_Z_conciliation(sp)
        assert check_unified(z).passed
        assert check_conciliation(z).passed


def test_worked_glue(p3):
    z = make_Z_conciliation(p3)
    fam = [p3.mask("12"), p3.mask("23")]
    assert glue(z, p3.mask("2"), fam, ["{1,2}", "{2,3}"]) == "{2}"
    assert glue(z, p3.mask("2"), [p3.mask("2")], ["{1,2}"]) == "{1,2}"


def test_glue_errors(p3):
    z = make_Z_conciliation(p3)
    fam = [p3.mask("12"), p3.mask("23")]
    with pytest.raises(NotMatching):
        glue(make_constant(p3, ["0", "1"]), p3.mask("2"), fam, ["0", "1"])
    with pytest.raises(ValueError):
        glue(z, p3.full, fam, ["{1,2}", "{2,3}"])
    c = collapsing(p3)
    with pytest.raises(AmbiguousGlue):
        glue(c, p3.mask("2"), fam, ["x", "x"])


def test_no_glue(p3):
    # carrier at {2} too small to hold the glue of a matching family
    sp = p3
    carriers = {w: ("a", "b") for w in sp.closeds}
    carriers[sp.mask("2")] = carriers[0] = ("a",)
    edges = {}
    for w1, w2 in sp.covering_pairs:
        edges[(w1, w2)] = {e: e if e in carriers[w2] else "a" for e in carriers[w1]}
    g = build_preconciliation(sp, carriers, edges)
    with pytest.raises(NoGlue):
        glue(g, sp.mask("2"), [sp.mask("12"), sp.mask("23")], ["b", "b"])
    assert not check_conciliation(g).passed


def collapsing(sp):
    """Constant {x, y} except that everything collapses in the two-point sets."""
    w2, w12, w23 = sp.mask("2"), sp.mask("12"), sp.mask("23")
    carriers = {w: ("x", "y") for w in sp.closeds}
    carriers[w12] = carriers[w23] = carriers[sp.full] = ("x",)
    edges = {}
    for a, b in sp.covering_pairs:
        edges[(a, b)] = {e: (e if b in (w2,) or len(carriers[b]) == 2 else "x")
                         for e in carriers[a]}
    return build_preconciliation(sp, carriers, edges)


def test_terminal_and_constant(p3):
    t = make_terminal(p3)
    assert all(t.size(w) == 1 for w in p3.closeds)
    assert is_conciliation(t)
    c = make_constant(p3, ["0", "1"])
    assert is_conciliation(c)
    star = make_constant(p3, ["*"])
    assert star == t
    with pytest.raises(EmptyCarrier):
        make_constant(p3, [])


def test_construction_errors(p3):
    sp = p3
    w2, w12, w23 = sp.mask("2"), sp.mask("12"), sp.mask("23")
    carriers = {w: ("a", "b") for w in sp.closeds}
    ident = {(a, b): {"a": "a", "b": "b"} for a, b in sp.covering_pairs}
    swapped = dict(ident)
    swapped[(w2, w12)] = {"a": "b", "b": "a"}
    with pytest.raises(PathDependence):
        build_preconciliation(sp, carriers, swapped)
    partial = dict(ident)
    del partial[(w2, w12)]
    with pytest.raises(MissingEdge):
        build_preconciliation(sp, carriers, partial)
    fewer = dict(carriers)
    del fewer[w23]
    with pytest.raises(MissingCarrier):
        PreConciliation(sp, fewer, {})
    with pytest.raises(ValueError):
        build_preconciliation(sp, carriers, {**ident, (w2, w12): {"a": "c", "b": "a"}})


def test_strict_and_joint_readings(p3):
    sp = p3
    # two elements collapse on X only: strict violation, joint fine
    carriers = {w: ("0", "1") for w in sp.closeds}
    carriers[sp.full] = ("0",)
    edges = {(a, b): ({"0": "0", "1": "0"} if b == sp.full else {"0": "0", "1": "1"})
             for a, b in sp.covering_pairs}
    g = build_preconciliation(sp, carriers, edges)
    assert check_unified(g).passed
    strict = check_unified(g, reading=STRICT)
    assert not strict.passed
    assert strict.counterexamples[0]["t"] == "0"
    # collapsing on both {1 2} and {2 3} breaks the joint reading at {2}
    bad = check_unified(collapsing(sp))
    assert not bad.passed
    assert any(cx["W"] == ["2"] for cx in bad.counterexamples)


def test_include_empty_scope():
    sp = build_space("ab", [[], ["a"], ["b"], ["a", "b"]])
    carriers = {w: ("u",) for w in sp.closeds}
    carriers[0] = ("u", "v")
    edges = {(a, b): {e: "u" for e in carriers[a]} for a, b in sp.covering_pairs}
    g = build_preconciliation(sp, carriers, edges)
    assert check_unified(g).passed
    assert not check_unified(g, include_empty=True).passed


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_reduced_and_literal_unified_agree(seed):
    g = random_preconciliation(seed)
    for reading in (JOINT, STRICT):
        for inc in (False, True):
            assert set(unified_violations(g, reading, inc)) == \
                set(unified_violations_literal(g, reading, None, inc))


def test_treaties(p3):
    assert len(treaty(make_Z_conciliation(p3), "2").classes) == 1
    assert len(treaty(make_terminal(p3), 0).classes) == 1
    t = treaty(make_constant(p3, ["0", "1"]), "1")
    assert len(t.classes) == 2
    assert t.class_of(p3.mask("12"), "1") == t.class_of(p3.full, "1")
    with pytest.raises(UnknownPoint):
        treaty(make_terminal(p3), "9")


def test_agree_exists(p3):
    z = make_Z_conciliation(p3)
    assert agree_exists(z, (p3.mask("12"), "{1,2}"), (p3.mask("23"), "{2,3}"))
    c = make_constant(p3, ["0", "1"])
    assert not agree_exists(c, (p3.mask("12"), "0"), (p3.mask("23"), "1"))


def test_associate_examples(p3):
    z = make_Z_conciliation(p3)
    za, rep = associate(z)
    assert rep.passed and rep.data["comparison_bijective"]
    assert all(za.size(w) == z.size(w) for w in p3.closeds)
    t = make_terminal(p3)
    assert all(len(r) == 1 for r in associated_conciliation(t).carriers.values())
    ga, rep = associate(collapsing(p3))
    assert rep.passed
    assert not rep.data["comparison_bijective"]


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_associated_is_conciliation(seed):
    g = random_preconciliation(seed)
    ga, rep = associate(g)
    assert rep.passed
    comp = comparison_map(g, ga)
    if is_conciliation(g):
        assert rep.data["comparison_bijective"]
    # the comparison commutes with mediations
    sp = g.space
    for a, b in sp.covering_pairs:
        for t in range(g.size(a)):
            assert ga.med(a, b)[comp[a][t]] == comp[b][g.med(a, b)[t]]
