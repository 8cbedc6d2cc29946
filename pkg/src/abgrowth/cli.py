"""Command-line front end: ``abgrowth structure|acceptor|growth|verify``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource cap
or inconclusive fit.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .abelian import PresentationError, load_group, mu as relator_mu
from .acceptor import FAILURE, ShortlexTest, build_acceptor, export_dot, export_json, fellow_traveller_constant, minimal_relations
from .checks import SuiteResult, closed_form_check, language_check, partition_check
from .kernels import CapExceeded
from .oracle import BallTable
from .series import RationalGF, format_coefficients
from .subgraph import (
    ConsistencyError,
    Inconclusive,
    SubgraphError,
    c_series,
    growth_exact,
    growth_fit,
    load_subgraph,
    prepare,
    verify_main_theorem,
    vertex_subgraph,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _gf_json(gf: RationalGF) -> dict:
    return {
        "numerator": list(gf.numerator.coeffs),
        "denominator_power": gf.denom_power,
        "text": gf.to_text(),
        "latex": gf.to_latex(),
    }


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _group(args):
    return load_group(_read(args.group))


def _subgraph(args, structure):
    if args.path is not None:
        letters = [x.strip() for x in args.path.split(",") if x.strip()]
        text = "path: " + ",".join(letters) if letters else "vertex"
        return load_subgraph(text, structure), f"path({','.join(letters)})" if letters else "vertex"
    if args.subgraph is None:
        return vertex_subgraph(structure), "vertex"
    src = args.subgraph
    if os.path.exists(src):
        return load_subgraph(_read(src), structure), os.path.basename(src)
    return load_subgraph(src, structure), src


def cmd_structure(args, out) -> int:
    spec, st = _group(args)
    m = relator_mu(spec)
    rels = minimal_relations(st, m + 1)
    kappa = fellow_traveller_constant(rels)
    gamma = max(m + 1, ShortlexTest(rels).saturation)
    alphabet = st.alphabet
    if args.format == "json":
        out.write(_dump({
            "alphabet": alphabet.symbols,
            "rank": st.rank,
            "invariant_factors": list(st.invariant_factors),
            "mu": m,
            "kappa": kappa,
            "default_gamma": gamma,
            "letter_images": {alphabet.letters[i].symbol: list(img) for i, img in enumerate(st.letter_image)},
            "minimal_relations": [r.format(alphabet) for r in rels],
        }))
        return EXIT_OK
    out.write(st.describe() + "\n")
    out.write(f"alphabet order: {' < '.join(alphabet.symbols)}\n")
    for i, img in enumerate(st.letter_image):
        out.write(f"  {alphabet.letters[i].symbol} -> {list(img)}\n")
    out.write(f"mu = {m}\nkappa = {kappa}\ndefault gamma (vertex) = {gamma}\n")
    out.write("minimal relations:\n")
    for r in rels:
        out.write(f"  {r.format(alphabet)}\n")
    return EXIT_OK


def _acceptor(args, spec, st, d: int = 0):
    m = relator_mu(spec)
    rels = minimal_relations(st, m + 1)
    test = ShortlexTest(rels)
    if args.gamma is not None:
        gamma = args.gamma
    else:
        gamma = max(d * fellow_traveller_constant(rels) + m + 1, test.saturation)
    try:
        return build_acceptor(st, test, gamma, mu=m)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_acceptor(args, out) -> int:
    spec, st = _group(args)
    acc = _acceptor(args, spec, st)
    if args.format == "json":
        out.write(export_json(acc) + "\n")
    elif args.format == "text":
        loops = int(np.count_nonzero(acc.has_loop))
        out.write(f"gamma = {acc.gamma}\naccept states = {acc.num_states}\nlooped states = {loops}\n")
    else:
        out.write(export_dot(acc))
    return EXIT_OK


def cmd_growth(args, out) -> int:
    spec, st = _group(args)
    s, name = _subgraph(args, st)
    method = args.method
    result: dict = {"group": st.describe(), "subgraph": name, "method": method, "results": {}}
    notes: list[str] = []
    if method == "oracle":
        n = args.max_n if args.max_n is not None else 12
        result["coefficients"] = c_series(st, s, n)
    if method in ("fit", "all"):
        fit = growth_fit(st, s, max_radius=args.max_n)
        result["results"]["fit"] = _gf_json(fit.gf)
        result["coefficients"] = fit.counts
        result["fit_onset"] = fit.onset
    if method in ("exact", "all"):
        try:
            ctx = prepare(spec, st, s, gamma=args.gamma)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if ctx.gamma < ctx.gamma_required:
            notes.append(f"gamma {ctx.gamma} is below the threshold d*kappa + mu + 1 = {ctx.gamma_required}")
        ex = growth_exact(ctx)
        result["results"]["exact"] = _gf_json(ex.gf)
        result["gamma"] = ctx.gamma
        result["gamma_required"] = ctx.gamma_required
        result["threshold"] = ex.threshold
        result["realizable_states"] = len(ex.deltas)
        result.setdefault("coefficients", ex.counts)
    if method == "all":
        texts = {v["text"] for v in result["results"].values()}
        result["agreement"] = len(texts) == 1
    result["notes"] = notes

    if args.format == "json":
        out.write(_dump(result))
    elif args.format == "latex":
        for k, v in sorted(result["results"].items()):
            out.write(f"C(S,z) = {v['latex']}\n")
        if not result["results"]:
            out.write(format_coefficients(result["coefficients"]) + "\n")
    else:
        out.write(f"group: {result['group']}\nsubgraph: {name}\n")
        for k, v in sorted(result["results"].items()):
            out.write(f"C(S,z) [{k}] = {v['text']}\n")
        out.write("coefficients: " + format_coefficients(result["coefficients"]) + "\n")
        for note in notes:
            out.write(f"note: {note}\n")
        if method == "all":
            out.write("methods agree\n" if result["agreement"] else "METHODS DISAGREE\n")
    if method == "all" and not result["agreement"]:
        return EXIT_FAIL
    return EXIT_OK


def _corrupt(acc):
    """Redirect the first letter out of the start state to failure."""
    trans = acc.trans.copy()
    trans[0, 0] = FAILURE
    return dataclasses.replace(acc, trans=trans)


def cmd_verify(args, out) -> int:
    spec, st = _group(args)
    s, name = _subgraph(args, st)
    acc = _acceptor(args, spec, st)
    if args.corrupt_acceptor:
        acc = _corrupt(acc)
    length = args.max_n if args.max_n is not None else 8
    suite = SuiteResult()
    table = BallTable(st, max(length, 30))

    lang = language_check(st, acc, length, table)
    detail = f"{lang.words_covered} words up to length {length}, {lang.mismatches} mismatches"
    if lang.first is not None:
        detail += f", first {st.alphabet.format_word(lang.first)}"
    suite.checks.append(("language", lang.ok, detail))

    bad = partition_check(acc, table, 30)
    suite.checks.append(("partition", bad is None, "j <= 30" if bad is None else f"first failure at j = {bad}"))

    bad = closed_form_check(acc, 40)
    suite.checks.append(("closed-form", bad is None, "all states, j <= 40" if bad is None else f"state {bad}"))

    try:
        report = verify_main_theorem(spec, st, s, name=name, gamma=args.gamma)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    suite.checks.append(("main-theorem", report.passed,
                         report.methods.get("fit", "") if report.passed else str(report.failure)))

    if args.format == "json":
        out.write(_dump({
            "group": st.describe(),
            "subgraph": name,
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in suite.checks],
            "passed": suite.ok,
            "report": dataclasses.asdict(report),
        }))
    else:
        for n, ok, d in suite.checks:
            out.write(f"{'PASS' if ok else 'FAIL'} {n}: {d}\n")
        out.write("all checks passed\n" if suite.ok else f"first failure: {suite.first_failure}\n")
    return EXIT_OK if suite.ok else EXIT_FAIL


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abgrowth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats, default):
        sp.add_argument("--group", required=True, help="presentation file")
        sp.add_argument("--gamma", type=_positive, help="override the acceptor's line length")
        sp.add_argument("--format", choices=formats, default=default)

    def subgraph_args(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--subgraph", help="subgraph file, or 'vertex' / 'path: a,b'")
        g.add_argument("--path", help="comma-separated path labels, e.g. a,b,c")
        sp.add_argument("--max-n", type=_positive, help="radius cap (word length for verify)")

    sp = sub.add_parser("structure", help="rank, torsion, mu, kappa")
    common(sp, ["text", "json"], "text")
    sp.set_defaults(func=cmd_structure)

    sp = sub.add_parser("acceptor", help="export the word acceptor")
    common(sp, ["dot", "json", "text"], "dot")
    sp.set_defaults(func=cmd_acceptor)

    sp = sub.add_parser("growth", help="compute C(S, z)")
    common(sp, ["text", "json", "latex"], "text")
    subgraph_args(sp)
    sp.add_argument("--method", choices=["exact", "fit", "oracle", "all"], default="fit")
    sp.set_defaults(func=cmd_growth)

    sp = sub.add_parser("verify", help="run the invariant suite")
    common(sp, ["text", "json"], "text")
    subgraph_args(sp)
    sp.add_argument("--corrupt-acceptor", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, PresentationError, SubgraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapExceeded, Inconclusive) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ConsistencyError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
