import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from concilia.errors import ModeMismatch, NotClosed, NotInZFamily, NotOpen, UnboundAtom
from concilia.generate import spaces_upto
from concilia.logic import (CLOSED, OPEN, And, Atom, Boundary, Diff, Implies, Not, Or, Top,
                            Valuation, atoms, boundary, check_brouwer_adjunction,
                            check_excluded_middle, check_leibniz, check_mediation_commutation,
                            check_relative_adjunction, eval_proposition, heyting_implication,
                            meet_with_negation, paraconsistent_negation, pseudo_difference,
                            relative_pseudo_difference, truth_table)
from concilia.topology import build_space, discrete_space, enumerate_spaces

SMALL = spaces_upto(3)


@pytest.fixture
def p3():
    return build_space("123", [[], ["1"], ["3"], ["1", "3"], ["1", "2", "3"]])


def test_pseudo_difference_examples(p3):
    m = p3.mask
    assert p3.names(pseudo_difference(p3, p3.full, m("12"))) == ["2", "3"]
    for z in p3.closeds:
        assert pseudo_difference(p3, z, 0) == z
        assert pseudo_difference(p3, z, p3.full) == 0


def test_pseudo_difference_rejects_open_input(p3):
    with pytest.raises(NotClosed):
        pseudo_difference(p3, p3.mask("1"), 0)


def test_meet_with_negation_differs_from_adjoint():
    # Sierpinski space: {b} minus {b} is empty, but {b} & ~{b} is {b}
    sp = build_space("ab", [[], ["a"], ["a", "b"]])
    b = sp.mask("b")
    assert pseudo_difference(sp, b, b) == 0
    assert meet_with_negation(sp, b, b) == b
    assert meet_with_negation(sp, sp.full, b) == pseudo_difference(sp, sp.full, b)


def test_relative_examples(p3):
    m = p3.mask
    assert p3.names(relative_pseudo_difference(p3, m("2"), m("12"), m("23"))) == ["1", "2"]
    wi = m("2")
    assert relative_pseudo_difference(p3, wi, wi, wi) == wi
    for z in p3.closed_supersets(wi):
        assert relative_pseudo_difference(p3, wi, z, wi) & wi == wi
    with pytest.raises(NotInZFamily):
        relative_pseudo_difference(p3, m("12"), m("23"), p3.full)


def test_negation_and_boundary(p3):
    m = p3.mask
    assert p3.names(paraconsistent_negation(p3, m("12"))) == ["2", "3"]
    assert p3.names(boundary(p3, m("12"))) == ["2"]
    assert boundary(p3, p3.full) == 0
    d = discrete_space("xyz")
    assert all(boundary(d, w) == 0 for w in d.closeds)


def test_heyting_examples(p3):
    m = p3.mask
    assert heyting_implication(p3, 0, m("3")) == p3.full
    assert heyting_implication(p3, p3.full, 0) == 0
    assert p3.names(heyting_implication(p3, m("1"), m("3"))) == ["3"]
    with pytest.raises(NotOpen):
        heyting_implication(p3, m("2"), 0)


def test_eval_examples(p3):
    a = Atom("a")
    val = Valuation({"a": p3.mask("12")})
    assert p3.names(eval_proposition(p3, And(a, Not(a)), val)) == ["2"]
    assert eval_proposition(p3, Or(a, Not(a)), val) == p3.full
    assert eval_proposition(p3, Boundary(a), val) == p3.mask("2")
    assert eval_proposition(p3, Diff(Top(), a), val) == p3.mask("23")


def test_eval_errors(p3):
    a = Atom("a")
    with pytest.raises(UnboundAtom):
        eval_proposition(p3, Atom("b"), Valuation({"a": 0}))
    with pytest.raises(ModeMismatch):
        eval_proposition(p3, Implies(a, a), Valuation({"a": 0}))
    with pytest.raises(ModeMismatch):
        eval_proposition(p3, Not(a), Valuation({"a": 0}, OPEN))
    with pytest.raises(NotClosed):
        eval_proposition(p3, a, Valuation({"a": p3.mask("1")}))
    with pytest.raises(ValueError):
        Valuation({}, "both")


def test_atoms_order_and_truth_table(p3):
    a, b = Atom("a"), Atom("b")
    assert atoms(Or(And(b, a), Not(b))) == ["b", "a"]
    rows = truth_table(p3, Or(a, Not(a)))
    assert len(rows) == 5 and all(v == p3.full for _, v in rows)
    rows = truth_table(p3, Implies(a, b), mode=OPEN)
    assert len(rows) == 25
    assert truth_table(p3, Top(), mode=CLOSED) == [({}, p3.full)]


def test_adjunction_counts(p3):
    assert check_brouwer_adjunction(p3).checked == 125
    one = enumerate_spaces(1)[0]
    rep = check_brouwer_adjunction(one)
    assert rep.passed and rep.checked == 8


@pytest.mark.parametrize("sp", SMALL, ids=repr)
def test_laws_on_small_spaces(sp):
    for check in (check_brouwer_adjunction, check_relative_adjunction, check_excluded_middle,
                  check_leibniz, check_mediation_commutation):
        rep = check(sp)
        assert rep.passed, (check.__name__, rep.counterexamples[:2])


def test_literal_difference_is_not_adjoint_on_most_spaces():
    bad = 0
    for sp in enumerate_spaces(3):
        fer = sp.closeds
        if any((meet_with_negation(sp, a, b) & ~c == 0) != (a & ~(b | c) == 0)
               for a in fer for b in fer for c in fer):
            bad += 1
    assert bad == 24


@given(st.sampled_from(spaces_upto(4)), st.data())
def test_pseudo_difference_is_least_closed_remainder(sp, data):
    a = data.draw(st.sampled_from(sp.closeds))
    b = data.draw(st.sampled_from(sp.closeds))
    opens = [oracles.to_sets(u, sp.n) for u in sp.opens]
    # oracle: intersect all closed c with a <= b | c
    fer = [c for c in sp.closeds if a & ~(b | c) == 0]
    least = sp.full
    for c in fer:
        least &= c
    assert pseudo_difference(sp, a, b) == least
    ref = oracles.closure(opens, sp.n, oracles.to_sets(a & ~b, sp.n))
    assert least == oracles.to_mask(ref)
