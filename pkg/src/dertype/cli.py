"""Command-line front end: ``dertype <command> ...``.

Exit codes: 0 verdict or passing check, 2 certificate failure or catalog
mismatch, 3 out of scope, 64 usage error, 65 parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import catalog as cat
from .classifier import classify
from .complexes import (RationalFamilyComplex, check_complex, complex_from_json, complex_to_json,
                        homology_report, specialize_family, vector_rank)
from .dsl import DSLError, parse_presentation
from .fields import QQ, field_from_spec
from .forms import BOXES, find_negative_vector, is_wild_hereditary, tits_form
from .quiver import PresentationError
from .recognition import is_gentle, is_nodal, is_special_biserial
from .truncated import DEFAULT_TRUNCATION, TruncatedAlgebra
from .wildness import (ModulePair, _Resolved, _needed_degree, get_bimodule, get_template,
                       instantiate_witness, verify_zero_composition)

SCHEMA = 1
OK, CERT_FAIL, OUT_OF_SCOPE, USAGE, PARSE = 0, 2, 3, 64, 65
ENV_TRUNCATION = "DERTYPE_TRUNCATION"


class ParseFailure(Exception):
    pass


class Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise Usage(message)


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseFailure(f"cannot read {path}: {exc.strerror}") from None


def _load_presentation(path, field=QQ):
    try:
        return parse_presentation(_read(path), field)
    except (DSLError, PresentationError) as exc:
        raise ParseFailure(f"{path}: {exc}") from None


def _load_complex(path):
    try:
        return complex_from_json(_read(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseFailure(f"{path}: {exc}") from None


def _default_truncation():
    raw = os.environ.get(ENV_TRUNCATION)
    if raw is None:
        return DEFAULT_TRUNCATION
    try:
        return int(raw)
    except ValueError:
        raise Usage(f"{ENV_TRUNCATION} must be an integer, got {raw!r}") from None


# --- human-readable summaries ----------------------------------------------------

_FAMILY = {"table1": "Table 1 entry {n}", "table2": "Table 2 entry {n}",
           "local": "local algebra {id}", "deformation": "deformation of {id}"}


def describe(result) -> str:
    ev = result.evidence
    kind = ev.get("kind")
    if kind in ("catalog", "deformation"):
        e = cat.get_entry(ev["id"])
        where = _FAMILY.get(e.family, "{id}").format(n=e.number, id=e.id)
        flag = "gentle" if ev.get("gentle") else "nodal, not gentle" if ev.get("nodal") else "neither gentle nor nodal"
        change = ev.get("arrow_change")
        if change:
            flag += ", after " + ", ".join(f"{k} -> {v}" for k, v in sorted(change.items()))
        return f"{result.verdict} ({where}, {flag})"
    if kind == "template":
        return f"{result.verdict} (witness {ev['template']} on box {ev['shape']})"
    if kind == "corner":
        return f"{result.verdict} (corner algebra: {describe_inner(ev['corner_result'])})"
    if kind == "citation":
        return f"{result.verdict} (external citation: {ev['source']})"
    if kind == "diagnostic":
        return f"{result.verdict}: {ev['reason']}"
    return f"{result.verdict} ({kind})"


def describe_inner(data: dict) -> str:
    ev = data["evidence"]
    if ev.get("kind") == "template":
        return f"witness {ev['template']} on box {ev['shape']}"
    return ev.get("kind", "?")


def _emit(args, payload: dict, text: str):
    if args.json:
        payload = {"schema": SCHEMA, "command": args.command, **payload}
        print(json.dumps(payload, sort_keys=True, default=str))
    else:
        print(text)


# --- commands ----------------------------------------------------------------------

def cmd_classify(args):
    p = _load_presentation(args.file, args.field_obj)
    r = classify(p, args.truncation)
    _emit(args, r.to_json(), describe(r))
    return OUT_OF_SCOPE if r.verdict == "out_of_scope" else OK


def _predicate(fn):
    def run(args):
        p = _load_presentation(args.file, args.field_obj)
        r = fn(p)
        tag = f" [{r.tag}]" if r.tag else ""
        _emit(args, r.to_json(), f"{str(r.verdict).lower()}{tag}")
        return OK
    return run


def cmd_tits_form(args):
    box = BOXES.get(args.box)
    if box is None:
        raise Usage(f"unknown box {args.box!r}; choose from {', '.join(BOXES)}")
    try:
        d = tuple(int(x) for x in args.dim.split(","))
    except ValueError:
        raise Usage(f"--dim must be comma-separated integers, got {args.dim!r}") from None
    if len(d) != len(box.vertices):
        raise Usage(f"{args.box} has {len(box.vertices)} vertices, got {len(d)} entries")
    val = tits_form(box, d)
    payload = {"box": args.box, "dim": list(d), "value": val}
    if not box.dashed:
        payload["wild_hereditary"] = is_wild_hereditary(box.to_quiver())
        if args.bound:
            neg = find_negative_vector(box, args.bound)
            payload["negative_vector"] = list(neg) if neg else None
    _emit(args, payload, str(val))
    return OK


def cmd_witness(args):
    try:
        T = get_template(args.case)
        B = get_bimodule(T.shape)
    except KeyError as exc:
        raise Usage(str(exc.args[0])) from None
    try:
        L = ModulePair.from_json(_read(args.module))
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseFailure(f"{args.module}: {exc}") from None
    p = T.presentation()
    cert = verify_zero_composition(T, p)
    if not cert.ok:
        _emit(args, {"certificate": cert.to_json()}, f"certificate failed: {cert.failures}")
        return CERT_FAIL
    probe = _Resolved(T, TruncatedAlgebra(p, 2))
    alg = TruncatedAlgebra(p, max(args.truncation, _needed_degree(T, probe.labels) + 2))
    C = instantiate_witness(T, B, L, alg)
    data = complex_to_json(C, p)
    rep = check_complex(C, alg)
    if args.json:
        data = {**data, "check": rep.to_json()}
    print(json.dumps(data, sort_keys=True))
    return OK if rep.ok else CERT_FAIL


def cmd_verify_complex(args):
    p, C = _load_complex(args.file)
    if isinstance(C, RationalFamilyComplex):
        raise Usage("verify-complex expects a plain complex; use specialize for families")
    rep = check_complex(C, TruncatedAlgebra(p, args.truncation))
    if rep.ok:
        text = "ok (square-zero, radical, bounded)"
    else:
        text = "FAIL: " + "; ".join(f"{f.get('check')} at degree {f.get('degree')}" for f in rep.failures)
    _emit(args, rep.to_json(), text)
    return OK if rep.ok else CERT_FAIL


def cmd_homology(args):
    p, C = _load_complex(args.file)
    if isinstance(C, RationalFamilyComplex):
        raise Usage("homology expects a plain complex")
    alg = TruncatedAlgebra(p, args.truncation)
    rep = check_complex(C, alg)
    if not rep.ok:
        _emit(args, {"check": rep.to_json()}, "not a complex: " + json.dumps(rep.failures, default=str))
        return CERT_FAIL
    h = homology_report(C, alg)
    dims = {str(k): v for k, v in sorted(h["dims"].items())}
    text = " ".join(f"H^{k}={v}" for k, v in dims.items()) + ("" if h["stable"] else "  (not stable under truncation)")
    _emit(args, {"dims": dims, "truncation": h["truncation"], "stable": h["stable"]}, text)
    return OK


def cmd_specialize(args):
    p, F = _load_complex(args.file)
    if not isinstance(F, RationalFamilyComplex):
        raise Usage("specialize expects a family (a file with a 'family' block)")
    try:
        lam = Fraction(args.lam)
    except ValueError:
        raise Usage(f"--lambda must be rational, got {args.lam!r}") from None
    try:
        C = specialize_family(F, args.m, lam)
    except ValueError as exc:
        raise Usage(str(exc)) from None
    rep = check_complex(C, TruncatedAlgebra(p, args.truncation))
    data = complex_to_json(C, p)
    if args.json:
        data = {**data, "check": rep.to_json(), "vector_rank": {str(n): list(r) for n, r in vector_rank(C).ranks}}
    print(json.dumps(data, sort_keys=True))
    return OK if rep.ok else CERT_FAIL


def cmd_catalog(args):
    if args.action == "list":
        rows = [e.to_json() for e in cat.load_catalog().values()]
        text = "\n".join(f"{e['id']:8} {e['family']:12} {e['derived_class']}" for e in rows)
        _emit(args, {"entries": rows}, text)
        return OK
    if not args.id:
        raise Usage("catalog show needs an entry id")
    try:
        e = cat.get_entry(args.id)
    except KeyError as exc:
        raise Usage(str(exc.args[0])) from None
    data = e.to_json()
    text = f"{e.id}: {e.derived_class}" + (f"\n{e.presentation.to_dsl()}" if e.presentation else "")
    _emit(args, data, text)
    return OK


def cmd_crosscheck(args):
    r = cat.crosscheck_tables(args.truncation)
    text = "crosscheck ok" if r["ok"] else "crosscheck FAILED: " + "; ".join(r["mismatches"])
    _emit(args, r, text)
    return OK if r["ok"] else CERT_FAIL


# --- argument parsing --------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("-N", "--truncation", type=int, default=None, help="truncation degree (default 8)")
    common.add_argument("--field", default="QQ", help="QQ or a prime p")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = _Parser(prog="dertype", description="Derived representation type of local and two-point algebras.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help):
        s = sub.add_parser(name, parents=[common], help=help)
        s.set_defaults(fn=fn)
        return s

    add("classify", cmd_classify, "classify a presentation").add_argument("file")
    add("check-gentle", _predicate(is_gentle), "gentle recognition").add_argument("file")
    add("check-sb", _predicate(is_special_biserial), "special biserial recognition").add_argument("file")
    add("check-nodal", _predicate(is_nodal), "nodal recognition").add_argument("file")
    s = add("tits-form", cmd_tits_form, "evaluate the Tits form of a shipped box")
    s.add_argument("--box", required=True)
    s.add_argument("--dim", required=True)
    s.add_argument("--bound", type=int, default=0, help="also search for a negative vector up to this bound")
    s = add("witness", cmd_witness, "instantiate a witness template at a module")
    s.add_argument("--case", required=True)
    s.add_argument("--module", required=True)
    add("verify-complex", cmd_verify_complex, "check square-zero, radical and boundedness").add_argument("file")
    add("homology", cmd_homology, "homology dimensions of a complex").add_argument("file")
    s = add("specialize", cmd_specialize, "specialize a rational family")
    s.add_argument("file")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s = add("catalog", cmd_catalog, "list or show catalog entries")
    s.add_argument("action", choices=["list", "show"])
    s.add_argument("id", nargs="?")
    add("crosscheck", cmd_crosscheck, "cross-check the two tables")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.truncation is None:
            args.truncation = _default_truncation()
        if args.truncation < 2:
            raise Usage("truncation must be at least 2")
        try:
            args.field_obj = field_from_spec(args.field)
        except ValueError as exc:
            raise Usage(str(exc)) from None
        random.seed(args.seed)
        return args.fn(args)
    except Usage as exc:
        print(f"dertype: {exc}", file=sys.stderr)
        return USAGE
    except ParseFailure as exc:
        print(f"dertype: parse error: {exc}", file=sys.stderr)
        return PARSE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
