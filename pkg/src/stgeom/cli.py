"""Command line front end: ``stgeom <command> [files...] [--example NAME] [--json]``.

Every command reads one or more structure files (or named examples), runs one
operation per input and prints a text report, or a deterministic JSON
document with ``--json``.  Inputs are processed concurrently; each input's
output is buffered and printed in the order given.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import gallery, io
from .acm import (
    ACMStructure,
    check_parallel,
    classify,
    conformal_const,
    dim5_lee_identity,
    field_eq_report,
    hol_span,
    homothety,
    is_killing,
    is_normal,
    is_st,
    lee_form,
    st_connection,
    torsion,
    validate,
)
from .errors import (
    DimensionError,
    InternalInconsistency,
    InvariantError,
    JacobiError,
    ParseError,
    PhiCompletionError,
    PreconditionError,
    StGeomError,
)
from .exterior import ce_d, format_form, format_rational
from .hermitian import (
    HermitianStructure,
    central_extension_st,
    cylinder,
    is_integrable,
    is_skt,
    kt_lee,
    kt_torsion,
    torus_extension,
)
from .warped import (
    format_rfun,
    format_wform,
    parse_rfun,
    r,
    warped_skt_report,
    warped_torsion_formula,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_PRECONDITION = 4
EXIT_JACOBI = 5
EXIT_PHI = 6
EXIT_INTERNAL = 7


def exit_code(exc: BaseException) -> int:
    """Map an exception to the documented exit code (most specific class first)."""
    for cls, code in (
        (JacobiError, EXIT_JACOBI),
        (PhiCompletionError, EXIT_PHI),
        (InternalInconsistency, EXIT_INTERNAL),
        (ParseError, EXIT_PARSE),
        (DimensionError, EXIT_PARSE),
        (InvariantError, EXIT_INVARIANT),
        (PreconditionError, EXIT_PRECONDITION),
    ):
        if isinstance(exc, cls):
            return code
    return EXIT_INTERNAL


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; usage errors here exit with 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def yes(flag: bool) -> str:
    return "yes" if flag else "no"


def vec_text(v, prefix: str = "E") -> str:
    parts = []
    for i, x in enumerate(v):
        if x == 0:
            continue
        name = f"{prefix}{i + 1}"
        if x == 1:
            term = name
        elif x == -1:
            term = f"-{name}"
        else:
            term = f"{format_rational(x)}*{name}"
        if parts and not term.startswith("-"):
            term = "+ " + term
        elif parts:
            term = "- " + term[1:]
        parts.append(term)
    return " ".join(parts) if parts else "0"


def matrix_text(m) -> list[str]:
    cells = [[format_rational(x) for x in row] for row in m]
    w = max((len(c) for row in cells for c in row), default=1)
    return ["  [" + " ".join(c.rjust(w) for c in row) + "]" for row in cells]


@dataclass
class Result:
    lines: list[str] = field(default_factory=list)
    doc: dict = field(default_factory=dict)
    output_doc: dict | None = None  # structure file written by --output


def _acm(obj, command: str) -> ACMStructure:
    if not isinstance(obj, ACMStructure):
        raise PreconditionError(f"{command} needs an almost contact metric structure")
    return obj


def _herm(obj, command: str) -> HermitianStructure:
    if not isinstance(obj, HermitianStructure):
        raise PreconditionError(f"{command} needs a Hermitian structure (\"kind\": \"hermitian\")")
    return obj


# -- command bodies -------------------------------------------------------------------

def cmd_validate(s, args) -> Result:
    s = _acm(s, "validate")
    rep = validate(s)
    res = Result()
    normal, killing = is_normal(s), is_killing(s)
    st = is_st(s)
    res.lines += [f"valid almost contact metric structure (dim {s.dim})",
                  f"normal: {yes(normal)}", f"Killing: {yes(killing)}", f"ST: {yes(st)}"]
    res.doc = {"valid": rep.ok, "failures": list(rep.failures), "normal": normal,
               "killing": killing, "st": st, "dim": s.dim}
    return res


def _classification_doc(c) -> dict:
    return {"primary": c.primary, "alpha": None if c.alpha is None else io.rat(c.alpha),
            "sasaki": c.is_sasaki, "sst": c.is_sst, "balanced": c.is_balanced,
            "deta_wedge_deta_zero": c.deta_decomposable, "quasi_sasaki": c.is_quasi_sasaki,
            "summary": c.summary()}


def cmd_classify(s, args) -> Result:
    s = _acm(s, "classify")
    c = classify(s)
    res = Result([c.summary(), f"balanced: {yes(c.is_balanced)}"])
    if c.alpha is not None:
        res.lines.append(f"alpha: {format_rational(c.alpha)}")
    res.doc = _classification_doc(c)
    return res


def cmd_torsion(s, args) -> Result:
    s = _acm(s, "torsion")
    c = torsion(s)
    dc = ce_d(s.L, c)
    res = Result([f"c = {format_form(c)}", f"dc = {format_form(dc)}"])
    res.doc = {"c": io.form_json(c), "dc": io.form_json(dc), "closed": dc.is_zero()}
    return res


def _connection_lines(conn) -> list[str]:
    return [f"nabla_E{i + 1} E{j + 1} = {vec_text(v)}" for i, j, v in conn.nonzero_entries()]


def cmd_connection(s, args) -> Result:
    s = _acm(s, "connection")
    conn = st_connection(s)
    par = check_parallel(s, conn)
    res = Result(_connection_lines(conn))
    res.lines.append(f"nonzero entries: {len(conn.nonzero_entries())}")
    res.lines.append(f"g, xi, phi parallel and torsion = c: {yes(par.ok)}")
    res.doc = {"connection": io.connection_json(conn), "parallel": par.ok}
    return res


def cmd_lee(s, args) -> Result:
    s = _acm(s, "lee")
    th = lee_form(s)
    res = Result([f"lee = {format_form(th)}", f"balanced: {yes(th.is_zero())}"])
    res.doc = {"lee": io.form_json(th), "balanced": th.is_zero()}
    if s.dim == 5:
        ok = dim5_lee_identity(s)
        res.lines.append(f"dF = lee ^ F: {yes(ok)}")
        res.doc["dF_equals_lee_wedge_F"] = ok
    return res


def cmd_field_eq(s, args) -> Result:
    s = _acm(s, "field-eq")
    rep = field_eq_report(s)
    res = Result(["Ric:"] + matrix_text(rep.ricci))
    res.lines += [f"d*c = {format_form(rep.dstar_c)}", f"dc = {format_form(rep.dc)}",
                  f"flat: {yes(rep.flat)}", f"Ricci flat: {yes(rep.ricci_flat)}",
                  f"field equations (Ric = 0, d*c = 0): {yes(rep.satisfied)}"]
    res.doc = {"ricci": io.matrix_json(rep.ricci), "dstar_c": io.form_json(rep.dstar_c),
               "dc": io.form_json(rep.dc), "flat": rep.flat, "ricci_flat": rep.ricci_flat,
               "satisfied": rep.satisfied}
    return res


def cmd_holonomy(s, args) -> Result:
    s = _acm(s, "holonomy")
    h = hol_span(s)
    res = Result([f"holonomy algebra dimension: {h.dimension}", f"annihilates xi: {yes(h.kills_xi)}",
                  f"in u(n): {yes(h.in_u)}", f"in su(n): {yes(h.in_su)}"])
    res.doc = {"dimension": h.dimension, "kills_xi": h.kills_xi, "in_u": h.in_u, "in_su": h.in_su,
               "basis": [io.matrix_json(b) for b in h.basis]}
    return res


def _hermitian_report(h: HermitianStructure) -> Result:
    integrable = is_integrable(h)
    res = Result([f"Hermitian structure (dim {h.dim})", f"integrable: {yes(integrable)}"])
    res.doc = {"dim": h.dim, "integrable": integrable}
    if integrable:
        cj, th = kt_torsion(h), kt_lee(h)
        skt = is_skt(h)
        res.lines += [f"KT torsion = {format_form(cj)}", f"SKT: {yes(skt)}",
                      f"KT lee = {format_form(th)}", f"balanced: {yes(th.is_zero())}"]
        res.doc.update({"kt_torsion": io.form_json(cj), "skt": skt, "kt_lee": io.form_json(th),
                        "balanced": th.is_zero()})
    return res


def cmd_cylinder(s, args) -> Result:
    h = cylinder(_acm(s, "cylinder"))
    res = _hermitian_report(h)
    res.lines.insert(0, "cylinder: T = E1, the structure occupies E2..")
    res.output_doc = io.hermitian_doc(h)
    return res


def _warped_result(s: ACMStructure, f, label: str) -> Result:
    rep = warped_skt_report(s, f)
    formula = warped_torsion_formula(s, f)
    agrees = formula == rep.torsion
    res = Result([f"f = {format_rfun(f)}", f"torsion = {format_wform(rep.torsion)}",
                  f"matches f^2 (c - 2 f' F ^ eta): {yes(agrees)}", rep.summary(label)])
    res.doc = {"f": format_rfun(f), "torsion": _wform_json(rep.torsion), "formula_matches": agrees,
               "closed": rep.closed, "branch": rep.branch,
               "lambda": None if rep.lam is None else io.rat(rep.lam)}
    return res


def _wform_json(w) -> dict:
    return {"a": [[format_rfun(v)] + [f"e{i + 1}" for i in k] for k, v in w.a.items()],
            "dr_b": [[format_rfun(v)] + [f"e{i + 1}" for i in k] for k, v in w.b.items()]}


def cmd_cone(s, args) -> Result:
    return _warped_result(_acm(s, "cone"), r, "cone")


def cmd_warp(s, args) -> Result:
    return _warped_result(_acm(s, "warp"), parse_rfun(args.f), "warped")


def _structure_result(t: ACMStructure, title: str) -> Result:
    c = torsion(t)
    cl = classify(t)
    res = Result([title, f"c = {format_form(c)}", cl.summary(), f"balanced: {yes(cl.is_balanced)}"])
    res.doc = {"structure": io.structure_doc(t), "c": io.form_json(c),
               "classification": _classification_doc(cl)}
    res.output_doc = io.structure_doc(t)
    return res


def cmd_homothety(s, args) -> Result:
    a = _parse_q(args.a, "--a")
    return _structure_result(homothety(_acm(s, "homothety"), a), f"homothety a = {format_rational(a)}")


def cmd_conformal(s, args) -> Result:
    lam2 = _parse_q(args.lam2, "--lam2")
    return _structure_result(conformal_const(_acm(s, "conformal"), lam2),
                             f"constant conformal change lambda^2 = {format_rational(lam2)}")


def cmd_extend(s, args) -> Result:
    h = _herm(s, "extend")
    sigma = io.load_form(args.sigma, h.dim)
    return _structure_result(central_extension_st(h, sigma), "central extension, xi = last basis vector")


def cmd_torus_extend(s, args) -> Result:
    s = _acm(s, "torus-extend")
    st = tuple(_parse_q(x, "--st") for x in args.st.split(","))
    if len(st) != 2:
        raise ParseError("--st expects two rationals 's,t'")
    ext = torus_extension(s, io.load_form(args.sigma1, s.dim), io.load_form(args.sigma2, s.dim), st)
    res = _structure_result(ext.structure, "torus extension, X1 and X2 appended")
    res.lines.insert(1, f"xi_perp = {vec_text(ext.xi_perp)}")
    res.doc["xi_perp"] = io.vector_json(ext.xi_perp)
    return res


def cmd_report(s, args) -> Result:
    s = _acm(s, "report")
    res = Result()
    for title, fn in (("validate", cmd_validate), ("classify", cmd_classify), ("torsion", cmd_torsion),
                      ("connection", cmd_connection), ("lee", cmd_lee), ("field-eq", cmd_field_eq)):
        part = fn(s, args)
        res.lines.append(f"== {title}")
        res.lines += part.lines
        res.doc[title] = part.doc
    return res


def _parse_q(text: str, opt: str):
    try:
        return io._rational(text, opt)
    except ParseError:
        raise ParseError(f"{opt}: {text!r} is not a rational number") from None


COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "torsion": cmd_torsion,
    "connection": cmd_connection,
    "lee": cmd_lee,
    "field-eq": cmd_field_eq,
    "holonomy": cmd_holonomy,
    "cylinder": cmd_cylinder,
    "cone": cmd_cone,
    "warp": cmd_warp,
    "homothety": cmd_homothety,
    "conformal": cmd_conformal,
    "extend": cmd_extend,
    "torus-extend": cmd_torus_extend,
    "report": cmd_report,
}


HELP = {
    "validate": "check the almost contact metric axioms, normality and Killing",
    "classify": "class of the torsion, dη∧dη and SST",
    "torsion": "torsion 3-form c and dc",
    "connection": "nonzero entries of the ST connection",
    "lee": "Lee form and balanced flag",
    "field-eq": "Ricci tensor, d*c and flatness of the ST connection",
    "holonomy": "dimension of the holonomy algebra",
    "cylinder": "Hermitian structure on the product with a line",
    "cone": "torsion of the cone (f = r) and whether it is closed",
    "warp": "torsion of a warped product for a given f",
    "homothety": "transversal homothety by a",
    "conformal": "transversal constant conformal change by lam2",
    "extend": "central extension of a Hermitian structure by sigma",
    "torus-extend": "ST structure on a torus extension",
    "report": "validate, classify, torsion, connection, lee and field-eq together",
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stgeom", description="Exact left-invariant Sasaki-with-torsion geometry.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name])
        sp.add_argument("inputs", nargs="*", help="structure files")
        sp.add_argument("--example", action="append", default=[], metavar="NAME",
                        help="use a built-in example (repeatable)")
        sp.add_argument("--json", action="store_true", help="emit a JSON document")
        sp.add_argument("-j", "--jobs", type=int, default=None, help="worker threads")
        if name in ("cylinder", "homothety", "conformal", "extend", "torus-extend"):
            sp.add_argument("-o", "--output", help="write the resulting structure file here")
        if name == "warp":
            sp.add_argument("--f", required=True, help="warping function of r, e.g. '1 + r^2'")
        if name == "homothety":
            sp.add_argument("--a", required=True, help="positive rational factor")
        if name == "conformal":
            sp.add_argument("--lam2", required=True, help="positive rational lambda^2")
        if name == "extend":
            sp.add_argument("--sigma", required=True, help="closed (1,1) 2-form: file or expression")
        if name == "torus-extend":
            sp.add_argument("--sigma1", required=True, help="first curvature form: file or expression")
            sp.add_argument("--sigma2", required=True, help="second curvature form: file or expression")
            sp.add_argument("--st", default="0,1", help="point (s,t) on the unit circle, default 0,1")
    ex = sub.add_parser("example", help="print a built-in example as a structure file")
    grp = ex.add_mutually_exclusive_group(required=True)
    grp.add_argument("--name")
    grp.add_argument("--list", action="store_true")
    return p


def _sources(args) -> list[tuple[str, Callable]]:
    out = [(path, (lambda p=path: io.load_structure(p))) for path in args.inputs]
    out += [(f"example:{n}", (lambda n=n: gallery.build(n))) for n in args.example]
    return out


@dataclass
class Outcome:
    source: str
    code: int
    result: Result | None = None
    error: str | None = None


def _run_one(source: str, load: Callable, fn: Callable, args) -> Outcome:
    try:
        return Outcome(source, EXIT_OK, fn(load(), args))
    except StGeomError as exc:
        return Outcome(source, exit_code(exc), error=f"{type(exc).__name__}: {exc}")


def run(argv: list[str] | None, out, err) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    if args.command == "example":
        if args.list:
            print("\n".join(sorted(gallery.BUILDERS)), file=out)
            return EXIT_OK
        try:
            out.write(io.dumps(io.structure_doc(gallery.build(args.name))))
        except StGeomError as exc:
            print(f"error: {exc}", file=err)
            return exit_code(exc)
        return EXIT_OK
    sources = _sources(args)
    if not sources:
        print(f"stgeom {args.command}: error: give at least one structure file or --example", file=err)
        return EXIT_USAGE
    if getattr(args, "output", None) and len(sources) != 1:
        print(f"stgeom {args.command}: error: --output needs exactly one input", file=err)
        return EXIT_USAGE
    fn = COMMANDS[args.command]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        outcomes = list(pool.map(lambda sl: _run_one(sl[0], sl[1], fn, args), sources))
    _emit(outcomes, args, out, err)
    for o in outcomes:
        if o.result is not None and o.result.output_doc is not None and getattr(args, "output", None):
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(o.result.output_doc))
    return max(o.code for o in outcomes)


def _emit(outcomes: list[Outcome], args, out, err):
    many = len(outcomes) > 1
    if args.json:
        docs = []
        for o in outcomes:
            d = {"format": io.FORMAT, "command": args.command, "source": o.source, "exit_code": o.code}
            if o.result is not None:
                d["result"] = o.result.doc
            else:
                d["error"] = o.error
                print(f"{o.source}: {o.error}", file=err)
            docs.append(d)
        out.write(io.dumps({"format": io.FORMAT, "results": docs} if many else docs[0]))
        return
    for o in outcomes:
        if many:
            print(f"# {o.source}", file=out)
        if o.result is not None:
            print("\n".join(o.result.lines), file=out)
        else:
            print(f"{o.source}: {o.error}", file=err)


def main(argv: list[str] | None = None) -> int:
    return run(argv, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
