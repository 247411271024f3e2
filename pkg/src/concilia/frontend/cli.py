"""Command-line interface: ``concilia COMMAND [FILE] [options]``.

Exit status is 0 when the check passes, 1 when it finds a counterexample
and 2 for usage, parse and resolution errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Callable

from .. import category as cat
from .. import cohomology as coh
from .. import conciliation as conc
from .. import duality as dual
from .. import groups as grp
from .. import logic
from ..errors import AmbiguousGlue, ConciliaError, NoGlue, NotClassifiable, NotMatching
from ..report import Report, emit_json
from ..topology import FiniteSpace, PointSet
from .build import Workspace
from .syntax import FrontendError, parse, parse_expression

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

COMMANDS: dict[str, tuple[Callable, str]] = {}


def command(name: str, help: str):
    def deco(fn):
        COMMANDS[name] = (fn, help)
        return fn
    return deco


def parse_set(space: FiniteSpace, text: str) -> PointSet:
    """``"{a b}"``, ``"a b"`` or ``"a,b"`` as a point set."""
    names = [t for t in re.split(r"[\s,]+", text.strip().strip("{}").strip()) if t]
    return space.mask(names)


def _load(args) -> Workspace:
    if args.file is None:
        raise FrontendError(f"{args.command} needs a .ccs file")
    data = Path(args.file).read_bytes()
    return Workspace(parse(data))


def _need(args, attr: str) -> str:
    value = getattr(args, attr)
    if value is None:
        raise FrontendError(f"{args.command} needs --{attr.replace('_', '-')}")
    return value


def _space(ws: Workspace, args) -> FiniteSpace:
    return ws.get(_need(args, "space"), "space")


def _conc(ws: Workspace, args, attr: str = "name") -> conc.PreConciliation:
    return ws.get(_need(args, attr), "conciliation")


# topology and logic


@command("check-space", "validate a declared space")
def cmd_check_space(args) -> Report:
    ws = _load(args)
    rep = Report("space")
    name = _need(args, "space")
    ws.decl(name, "space")
    try:
        sp = ws.get(name, "space")
    except ConciliaError as exc:
        rep.fail(space=name, problem=type(exc).__name__, message=str(exc))
        return rep
    rep.checked = len(sp.opens)
    rep.data.update(points=list(sp.points), opens=[sp.names(u) for u in sp.opens],
                    closed_sets=[sp.names(w) for w in sp.closeds])
    return rep


@command("closed-sets", "list the closed sets of a space")
def cmd_closed_sets(args) -> Report:
    sp = _space(_load(args), args)
    rep = Report("closed-sets", checked=len(sp.closeds))
    rep.data["closed_sets"] = [sp.names(w) for w in sp.closeds]
    return rep


@command("check-brouwer", "pseudo-difference adjunction and related laws on a space")
def cmd_check_brouwer(args) -> Report:
    sp = _space(_load(args), args)
    rep = logic.check_brouwer_adjunction(sp)
    rep.merge(logic.check_relative_adjunction(sp), "relative")
    rep.merge(logic.check_leibniz(sp), "leibniz")
    rep.merge(logic.check_mediation_commutation(sp), "mediation")
    return rep


def _prop(ws: Workspace, text: str):
    if text in ws.decls:
        return ws.get(text, "prop")
    return parse_expression(text)


@command("eval", "evaluate a proposition under a valuation")
def cmd_eval(args) -> Report:
    ws = _load(args)
    p = _prop(ws, _need(args, "prop"))
    sp, val = ws.get(_need(args, "val"), "valuation")
    value = logic.eval_proposition(sp, p, val)
    rep = Report("eval", checked=1)
    rep.data.update(value=sp.names(value), mode=val.mode)
    return rep


@command("truth-table", "values of a proposition under every valuation of its atoms")
def cmd_truth_table(args) -> Report:
    ws = _load(args)
    p = _prop(ws, _need(args, "prop"))
    sp = _space(ws, args)
    rows = logic.truth_table(sp, p, mode=args.mode)
    rep = Report("truth-table", checked=len(rows))
    rep.data["rows"] = [{"assignment": {a: sp.names(s) for a, s in asg.items()},
                         "value": sp.names(v)} for asg, v in rows]
    return rep


# conciliations


@command("check-unified", "separation of elements by co-coverings")
def cmd_check_unified(args) -> Report:
    g = _conc(_load(args), args)
    reading = conc.STRICT if args.strict else conc.JOINT
    return conc.check_unified(g, reading, literal=args.literal, max_family=args.max_family)


@command("check-conciliation", "separation and unique gluing")
def cmd_check_conciliation(args) -> Report:
    g = _conc(_load(args), args)
    rep = conc.check_conciliation(g, args.max_family)
    rep.merge(conc.check_unified(g), "unified")
    return rep


@command("glue", "glue a matching family of sections")
def cmd_glue(args) -> Report:
    g = _conc(_load(args), args)
    sp = g.space
    members = [parse_set(sp, s) for s in args.member or ()]
    sections = list(args.section or ())
    if not members:
        raise FrontendError("glue needs at least one --member")
    w = sp.full
    for v in members:
        w &= v
    rep = Report("glue", checked=1)
    rep.data.update(W=sp.names(w), family=[sp.names(v) for v in members], sections=sections)
    try:
        rep.data["glued"] = conc.glue(g, w, members, sections)
    except (NotMatching, NoGlue, AmbiguousGlue) as exc:
        rep.fail(W=sp.names(w), problem=type(exc).__name__, message=str(exc))
    return rep


@command("treaty", "agreement classes at a point")
def cmd_treaty(args) -> Report:
    g = _conc(_load(args), args)
    sp = g.space
    t = conc.treaty(g, _need(args, "point"))
    rep = Report("treaty", checked=sum(len(c) for c in t.classes))
    rep.data.update(point=t.point, classes=[
        {"label": lab, "members": [{"W": sp.names(w), "element": e} for w, e in cls]}
        for lab, cls in zip(t.labels, t.classes)])
    return rep


@command("associate", "build and verify the associated conciliation")
def cmd_associate(args) -> Report:
    g = _conc(_load(args), args)
    ga, rep = conc.associate(g, args.max_family)
    sp = g.space
    rep.data["carriers"] = {sp.format(w): list(ga.carriers[w]) for w in sp.closeds}
    return rep


@command("quotient", "quotient of a group conciliation by a sub-object")
def cmd_quotient(args) -> Report:
    ws = _load(args)
    g = ws.get(_need(args, "name"), "groupconciliation").group
    sub = ws.get(_need(args, "sub"), "groupconciliation")
    q = grp.quotient(g, sub.group, sub.inclusions or None)
    rep = grp.check_group_conciliation(q, args.max_family)
    rep.name = "quotient"
    rep.data["dims"] = {q.space.format(w): q.dim(w) for w in q.space.closeds}
    return rep


# category


@command("check-morphism", "naturality of a declared morphism")
def cmd_check_morphism(args) -> Report:
    return cat.check_morphism(_load(args).get(_need(args, "name"), "morphism"))


@command("product", "product of two conciliations, re-verified")
def cmd_product(args) -> Report:
    ws = _load(args)
    g1, g2 = _conc(ws, args, "left"), _conc(ws, args, "right")
    p = cat.product(g1, g2)
    rep = conc.check_conciliation(p, args.max_family)
    rep.merge(conc.check_unified(p), "unified")
    rep.name = "product"
    sp = p.space
    rep.data["carrier_sizes"] = {sp.format(w): p.size(w) for w in sp.closeds}
    return rep


@command("check-subobject", "subconciliation and classifier diagram")
def cmd_check_subobject(args) -> Report:
    ws = _load(args)
    gp, g = _conc(ws, args, "sub"), _conc(ws, args)
    rep = cat.is_subconciliation(gp, g, args.max_family)
    if rep.passed:
        rep.merge(cat.check_classifier_diagram(gp, g), "classifier")
    return rep


@command("classify", "least closed superset where an element enters a subobject")
def cmd_classify(args) -> Report:
    ws = _load(args)
    gp, g = _conc(ws, args, "sub"), _conc(ws, args)
    sp = g.space
    w = parse_set(sp, _need(args, "set"))
    t = _need(args, "element")
    rep = Report("classify", checked=1)
    rep.data.update(W=sp.names(w), element=t)
    try:
        rep.data["psi"] = sp.names(cat.classify(gp, g, w, t))
    except NotClassifiable as exc:
        rep.fail(W=sp.names(w), element=t, problem=str(exc))
    return rep


# cohomology


@command("cohomology", "cohomology dimensions on a covering")
def cmd_cohomology(args) -> Report:
    ws = _load(args)
    g = ws.get(_need(args, "name"), "groupconciliation").group
    cov = ws.get(_need(args, "covering"), "covering")
    if cov.space != g.space:
        raise FrontendError("covering and group conciliation live over different spaces")
    c = coh.build_complex(g, cov.sets, args.max_degree)
    rep = coh.check_dd_zero(c)
    rep.name = "cohomology"
    rep.warnings.extend(c.warnings)
    groups = [coh.cohomology(c, p) for p in range(c.max_degree + 1)]
    rep.data.update(field=repr(g.field), cochain_dims=c.dims[: c.max_degree + 1],
                    H=[h.dim for h in groups])
    return rep


# lattices


def _lattice(ws: Workspace, args, from_space: Callable) -> dual.FiniteLattice:
    if args.name is not None:
        return ws.get(args.name, "lattice")
    if args.space is not None:
        return from_space(ws.get(args.space, "space"))
    raise FrontendError(f"{args.command} needs --name LATTICE or --space SPACE")


@command("check-globale", "join distributes over arbitrary meets")
def cmd_check_globale(args) -> Report:
    return dual.check_globale(_lattice(_load(args), args, dual.closed_lattice))


@command("check-locale", "meet distributes over arbitrary joins")
def cmd_check_locale(args) -> Report:
    return dual.check_locale(_lattice(_load(args), args, dual.open_lattice))


@command("check-quantale", "monoid distributes over arbitrary joins")
def cmd_check_quantale(args) -> Report:
    return dual.check_quantale(
        _lattice(_load(args), args, lambda sp: dual.open_lattice(sp).with_meet_monoid()))


@command("check-universale", "monoid distributes over arbitrary meets")
def cmd_check_universale(args) -> Report:
    if args.scan is not None:
        return dual.scan_small_universales(args.scan)
    l = _lattice(_load(args), args, lambda sp: dual.closed_lattice(sp).with_join_monoid())
    rep = dual.check_universale(l)
    if args.theorems and rep.passed:
        rep.merge(dual.check_universale_theorems(l), "theorems")
    return rep


@command("check-sheaf", "sheaf axioms of a presheaf on the open sets")
def cmd_check_sheaf(args) -> Report:
    ws = _load(args)
    name = _need(args, "name")
    d = ws.decl(name)
    if type(d).__name__ == "PresheafDecl":
        f = ws.get(name, "presheaf")
    else:
        f = dual.DualPresheaf.from_conciliation(ws.get(name, "conciliation"))
    return dual.check_sheaf_by_duality(f, args.max_family)


@command("self-test", "cross-check the engines on seeded random fixtures")
def cmd_self_test(args) -> Report:
    from ..generate import random_preconciliation

    rep = Report("self-test")
    seed = args.seed if args.seed is not None else 0
    for s in range(seed, seed + args.count):
        g = random_preconciliation(s)
        sp = g.space
        for reading in (conc.JOINT, conc.STRICT):
            rep.checked += 1
            fast = conc.unified_violations(g, reading)
            slow = conc.unified_violations_literal(g, reading)
            if set(fast) != set(slow):
                rep.fail(seed=s, problem=f"{reading} separation engines disagree")
        ga, arep = conc.associate(g)
        rep.checked += 1
        if not arep.passed:
            rep.fail(seed=s, problem="associated conciliation fails the axioms")
        rep.checked += 1
        f = dual.DualPresheaf.from_conciliation(g)
        if f.to_conciliation() != g:
            rep.fail(seed=s, problem="order reversal is not an involution")
        if conc.is_conciliation(g):
            for w in sp.closeds:
                if not w:
                    continue
                for fam in conc.co_coverings(sp, w):
                    for t in g.carriers[w]:
                        rep.checked += 1
                        secs = [g.push(w, v, t) for v in fam.members]
                        if conc.glue(g, w, fam.members, secs) != t:
                            rep.fail(seed=s, W=sp.names(w), element=t,
                                     problem="glue after restriction is not the identity")
    rep.data.update(first_seed=seed, fixtures=args.count)
    return rep


# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", nargs="?", help=".ccs document")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--max-family", type=int, default=None,
                        help="largest co-covering family to enumerate")
    common.add_argument("--seed", type=int, default=None, help="first seed for self-test")
    common.add_argument("--max-degree", type=int, default=None, help="top cohomology degree")
    common.add_argument("--name", "--conc", dest="name", help="object to check")
    common.add_argument("--space")
    common.add_argument("--prop")
    common.add_argument("--val")
    common.add_argument("--mode", choices=("closed", "open"), default="closed")
    common.add_argument("--strict", action="store_true", help="per-member separation")
    common.add_argument("--literal", action="store_true",
                        help="enumerate co-coverings instead of the reduced check")
    common.add_argument("--member", action="append", help="family member set (repeatable)")
    common.add_argument("--section", action="append", help="section id (repeatable)")
    common.add_argument("--point")
    common.add_argument("--sub", help="subobject")
    common.add_argument("--left")
    common.add_argument("--right")
    common.add_argument("--set")
    common.add_argument("--element")
    common.add_argument("--covering")
    common.add_argument("--theorems", action="store_true")
    common.add_argument("--scan", type=int, default=None, metavar="N",
                        help="scan every lattice with at most N elements")
    common.add_argument("--count", type=int, default=200, help="self-test fixtures")

    parser = argparse.ArgumentParser(prog="concilia",
                                     description="Check conciliations on finite spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def _error_json(exc: Exception) -> str:
    body = {"type": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "line", 0):
        body.update(line=exc.line, col=exc.col)
    return json.dumps({"schema": 1, "error": body}, ensure_ascii=False, separators=(",", ":"))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        rep = fn(args)
    except (ConciliaError, ValueError, OSError) as exc:
        if args.json:
            print(_error_json(exc))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(emit_json(rep) if args.json else rep.render_text())
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
