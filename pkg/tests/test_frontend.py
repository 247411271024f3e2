import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import concilia
from concilia.errors import ConciliaError, MissingEmptyOrFull
from concilia.frontend import (CcsSyntaxError, DeclTypeError, ResolutionError, build,
                               parse, parse_expression, render, render_expression)
from concilia.frontend.cli import main
from concilia.frontend.syntax import MAX_NESTING, AutoConciliationDecl, SpaceDecl
from concilia.logic import And, Atom, Boundary, Bottom, Diff, Implies, Not, Or, Top

FIXTURES = sorted((Path(concilia.__file__).parent / "fixtures").glob("*.ccs"))
SIERPINSKI = "space S { points: a b; opens: {}, {a}, {a b}; }\n"


def fixture(name):
    return str(next(p for p in FIXTURES if p.stem == name))


def test_fixtures_shipped():
    assert {p.stem for p in FIXTURES} >= {"sierpinski", "paraconsistent", "groups", "lattices",
                                          "sheaves"}


def test_parse_space():
    doc = parse(SIERPINSKI)
    (d,) = doc.decls
    assert isinstance(d, SpaceDecl)
    assert d.points == ("a", "b")
    sp = build(doc).get("S")
    assert sp.names(sp.closeds[1]) == ["b"]


def test_parse_auto_conciliation():
    doc = parse(SIERPINSKI + "conciliation Z auto zeta over S;\n")
    assert isinstance(doc.symbols["Z"], AutoConciliationDecl)
    z = build(doc).get("Z")
    assert z.carrier(0) == ("{}", "{b}", "{a,b}")


def test_missing_full_set_is_located():
    doc = parse("\n\nspace S {\n  points: a b;\n  opens: {}, {a};\n}\n")
    with pytest.raises(MissingEmptyOrFull) as e:
        build(doc)
    assert (e.value.line, e.value.col) == (3, 1)
    assert str(e.value).startswith("3:1:")


def test_syntax_errors_are_positioned():
    with pytest.raises(CcsSyntaxError) as e:
        parse("space S {\n  points a b;\n}")
    assert e.value.line == 2 and "expected" in str(e.value)
    with pytest.raises(CcsSyntaxError) as e:
        parse(b"space \xff")
    assert (e.value.line, e.value.col) == (1, 7)
    with pytest.raises(CcsSyntaxError):
        parse("prop p: a & ;")


def test_resolution_and_type_errors():
    with pytest.raises(ResolutionError):
        build(parse("conciliation Z auto zeta over Nowhere;"))
    with pytest.raises(ResolutionError):
        build(parse(SIERPINSKI + SIERPINSKI))
    with pytest.raises(DeclTypeError):
        build(parse(SIERPINSKI + "conciliation Z auto zeta over S;"
                    "conciliation Y auto zeta over Z;"))
    with pytest.raises(DeclTypeError):
        build(parse(SIERPINSKI + "covering C over S: {a};"))
    with pytest.raises(ResolutionError):
        build(parse(SIERPINSKI + "covering C over S: {c};"))


def test_deep_nesting_is_rejected_cleanly():
    deep = "(" * (MAX_NESTING + 5) + "a" + ")" * (MAX_NESTING + 5)
    with pytest.raises(CcsSyntaxError):
        parse_expression(deep)
    with pytest.raises(CcsSyntaxError):
        parse_expression("~" * 5000 + "a")
    with pytest.raises(CcsSyntaxError):
        parse_expression(" & ".join(["a"] * 5000))
    assert parse_expression("(" * 20 + "a" + ")" * 20) == Atom("a")


def test_expression_precedence():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    assert parse_expression("a | b & ~c") == Or(a, And(b, Not(c)))
    assert parse_expression("a \\ b => c") == Implies(Diff(a, b), c)
    assert parse_expression("bd a & T | F") == Or(And(Boundary(a), Top()), Bottom())
    assert render_expression(Diff(a, Diff(b, c))) == "a \\ (b \\ c)"
    assert render_expression(And(Or(a, b), c)) == "(a | b) & c"


atoms = st.sampled_from(["a", "b", "w", "x1"]).map(Atom) | st.just(Top()) | st.just(Bottom())
props = st.recursive(
    atoms,
    lambda kids: st.one_of(
        kids.map(Not), kids.map(Boundary),
        *(st.tuples(kids, kids).map(lambda t, k=k: k(*t)) for k in (And, Or, Diff, Implies))),
    max_leaves=25)


@given(props)
def test_expression_round_trip(p):
    assert parse_expression(render_expression(p)) == p


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.stem)
def test_fixture_round_trip(path):
    doc = parse(path.read_text())
    again = parse(render(doc))
    assert again == doc
    assert render(again) == render(doc)
    ws = build(doc)
    assert set(ws.build_all()) == set(doc.symbols)


def _pieces():
    toks = set()
    for p in FIXTURES:
        toks.update(p.read_text().split())
    return sorted(toks) + ["{", "}", ";", ":", "->", "=>", "[", "]", "(", ")", "~", "\\", "#"]


PIECES = _pieces()


@settings(max_examples=300)
@given(st.binary(max_size=200))
def test_random_bytes_never_crash(data):
    try:
        build(parse(data))
    except ConciliaError:
        pass


@settings(max_examples=300)
@given(st.lists(st.sampled_from(PIECES), max_size=60))
def test_token_soup_never_crashes(words):
    try:
        build(parse(" ".join(words)))
    except ConciliaError:
        pass


@settings(max_examples=200)
@given(st.sampled_from(FIXTURES), st.data())
def test_mutated_fixtures_never_crash(path, data):
    text = path.read_text()
    i = data.draw(st.integers(0, len(text)))
    j = data.draw(st.integers(i, min(len(text), i + 20)))
    ins = data.draw(st.sampled_from(PIECES + [""]))
    try:
        build(parse(text[:i] + ins + text[j:]))
    except ConciliaError:
        pass


# command line


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv, code", [
    (["check-space", fixture("sierpinski"), "--space", "S"], 0),
    (["check-brouwer", fixture("paraconsistent"), "--space", "P"], 0),
    (["check-conciliation", fixture("sierpinski"), "--name", "zeta"], 0),
    (["check-unified", fixture("sierpinski"), "--name", "pair", "--strict"], 0),
    (["check-morphism", fixture("sierpinski"), "--name", "bang"], 0),
    (["check-morphism", fixture("sierpinski"), "--name", "twist"], 1),
    (["check-subobject", fixture("sierpinski"), "--name", "Zs", "--sub", "Zb"], 0),
    (["cohomology", fixture("paraconsistent"), "--conc", "K", "--covering", "C",
      "--max-degree", "1"], 0),
    (["check-globale", fixture("lattices"), "--name", "M3"], 1),
    (["check-locale", fixture("paraconsistent"), "--space", "P"], 0),
    (["check-universale", fixture("lattices"), "--scan", "4"], 0),
    (["check-sheaf", fixture("sheaves"), "--name", "Blur"], 1),
    (["check-sheaf", fixture("sheaves"), "--name", "Const"], 0),
    (["quotient", fixture("groups"), "--name", "G", "--sub", "D"], 0),
    (["check-conciliation", fixture("sierpinski"), "--name", "nothing"], 2),
    (["check-conciliation", fixture("sierpinski"), "--name", "S"], 2),
])
def test_cli_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_cli_eval(capsys):
    code, out, _ = run(capsys, "eval", fixture("paraconsistent"), "--prop", "w & ~w",
                       "--val", "W12", "--json")
    assert code == 0
    assert json.loads(out)["data"]["value"] == ["2"]


def test_cli_glue(capsys):
    code, out, _ = run(capsys, "glue", fixture("paraconsistent"), "--name", "zeta",
                       "--set", "{2}", "--member", "{1 2}", "--member", "{2 3}",
                       "--section", "{1,2}", "--section", "{2,3}", "--json")
    assert code == 0
    assert json.loads(out)["data"]["glued"] == "{2}"


def test_cli_cohomology_json(capsys):
    code, out, _ = run(capsys, "cohomology", fixture("paraconsistent"), "--conc", "K",
                       "--covering", "C", "--json")
    assert code == 0
    assert json.loads(out)["data"]["H"] == [1, 0]


def test_cli_error_json(capsys):
    code, out, _ = run(capsys, "check-conciliation", fixture("sierpinski"), "--name", "nope",
                       "--json")
    body = json.loads(out)
    assert code == 2 and body["schema"] == 1 and body["error"]["type"] == "ResolutionError"


def test_json_is_byte_identical(capsys):
    argv = ["check-conciliation", fixture("paraconsistent"), "--name", "zeta", "--json"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    assert json.loads(first)["verdict"] == "pass"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "concilia", "check-globale", fixture("lattices"),
                          "--name", "M3", "--json"], capture_output=True, text=True)
    assert out.returncode == 1
    body = json.loads(out.stdout)
    assert body["verdict"] == "fail" and body["counterexamples"]
