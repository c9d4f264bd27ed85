"""Command-line interface: ``chulog <command> ...``.

Exit codes: 0 success, 1 semantic failure (syntax error, failing law or
axiom, translation mismatch), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from .lattice import LatticeError, ZOO, lattice_by_id
from .models import ModelError, all_model_ids, model_by_id
from .semantics import (
    LAW_INDEX, EvalError, LawReport, SearchResult, Structure, StructureError,
    check_structure, evaluate, law_suite, search_countermodel,
)
from .syntax import (
    ParseError, TheoryError, dump_linear, parse_linear, parse_sequent, parse_theory,
)
from .translate import TranslateError, diff_sequents, format_iseq, format_json, parse_iseq, translate_theory

FORMAT_ENV = "CHULOG_FORMAT"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _theory(path: str):
    try:
        return parse_theory(_read(path))
    except ParseError as exc:
        raise _Located(path, exc) from None


class _Located(Exception):
    def __init__(self, path: str, exc: ParseError):
        super().__init__(f"{path}:{exc.line}:{exc.col}: {exc.message}")


def _models(ids: Sequence[str] | None) -> list[str]:
    out: list[str] = []
    for mid in ids or []:
        if mid == "all":
            out.extend(all_model_ids())
            continue
        try:
            model_by_id(mid)
        except ModelError as exc:
            raise UsageError(str(exc)) from None
        out.append(mid)
    return out


# -- parse -------------------------------------------------------------------

def cmd_parse(args) -> int:
    if args.expr is not None:
        source, text = "<expr>", args.expr
    elif args.path:
        source, text = args.path, _read(args.path)
    else:
        raise UsageError("parse needs a file or -e EXPR")
    items = []
    if source.endswith(".llt"):
        th = _theory(source)
        for ax in th.axioms:
            seq = ax.sequent
            items.append({"axiom": ax.name,
                          "context": [f"{v}:{s}" for v, s in seq.context],
                          "hypotheses": [dump_linear(h) for h in seq.hypotheses],
                          "conclusion": dump_linear(seq.conclusion)})
    else:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            if not line.strip():
                continue
            try:
                if "|-" in line:
                    seq = parse_sequent(line)
                    items.append({"line": lineno, "context": [f"{v}:{s}" for v, s in seq.context],
                                  "hypotheses": [dump_linear(h) for h in seq.hypotheses],
                                  "conclusion": dump_linear(seq.conclusion)})
                else:
                    items.append({"line": lineno, "formula": dump_linear(parse_linear(line))})
            except ParseError as exc:
                print(f"{source}:{lineno}:{exc.col}: {exc.message}", file=sys.stderr)
                return EXIT_FAIL
    if args.format == "json":
        _write(None, _dumps({"schema": "chulog.parse/1", "source": source, "items": items}))
        return EXIT_OK
    for it in items:
        if "formula" in it:
            print(it["formula"])
            continue
        label = it.get("axiom", it.get("line"))
        ctx = f"[{', '.join(it['context'])}] " if it["context"] else ""
        hyps = " ".join(it["hypotheses"])
        print(f"{label}: {ctx}{hyps}{' ' if hyps else ''}|- {it['conclusion']}")
    return EXIT_OK


# -- eval --------------------------------------------------------------------

def _structure(path: str, model_id: str | None, theory=None) -> Structure:
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    model = None
    if model_id:
        try:
            model = model_by_id(model_id)
        except ModelError as exc:
            raise UsageError(str(exc)) from None
    try:
        return Structure.from_json(obj, model=model, theory=theory)
    except ModelError as exc:
        raise UsageError(str(exc)) from None


def _valuation(items: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for item in items or []:
        var, sep, value = item.partition("=")
        if not sep or not var or not value:
            raise UsageError(f"expected VAR=ELEMENT, got {item!r}")
        out[var.strip()] = value.strip()
    return out


def cmd_eval(args) -> int:
    theory = _theory(args.theory) if args.theory else None
    try:
        f = parse_linear(args.formula, theory)
    except ParseError as exc:
        print(f"<formula>:{exc.line}:{exc.col}: {exc.message}", file=sys.stderr)
        return EXIT_FAIL
    try:
        s = _structure(args.structure, args.model, theory)
        value = evaluate(f, s, _valuation(args.let))
    except (StructureError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    m = s.model
    if args.format == "json":
        _write(None, _dumps({"schema": "chulog.eval/1", "model": m.model_id,
                             "formula": args.formula, "value": m.to_json(value)}))
    else:
        print(m.fmt(value))
    return EXIT_OK


# -- laws --------------------------------------------------------------------

def _law_text(report: LawReport) -> str:
    lines = []
    for r in report.results:
        line = f"{r.law:<34} {r.model:<22} {r.status:<8}"
        if r.witness:
            line += " " + ", ".join(f"{k}={v}" for k, v in r.witness.items())
        if r.status == "FAILED" and r.expected != "holds":
            line += f"  [expected: {r.expected or 'unclaimed'}]"
        elif r.unexpected:
            line += "  [UNEXPECTED]"
        if r.reason:
            line += f"  ({r.reason})"
        lines.append(line.rstrip())
    protocols = sorted({r.protocol for r in report.results})
    bad = sum(r.unexpected for r in report.results)
    lines.append(f"# seed={report.seed} protocols={','.join(protocols)} unexpected={bad}")
    return "\n".join(lines) + "\n"


def cmd_laws(args) -> int:
    models = _models(args.model or ["all"])
    report = law_suite(args.suite, models, seed=args.seed, samples=args.samples, jobs=args.jobs)
    text = _dumps(report.to_json()) if args.format == "json" else _law_text(report)
    _write(args.output, text)
    return EXIT_OK if report.ok else EXIT_FAIL


# -- translate ---------------------------------------------------------------

def cmd_translate(args) -> int:
    theory = _theory(args.theory)
    try:
        rows = translate_theory(theory)
    except TranslateError as exc:
        print(f"{args.theory}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.output or not args.diff:
        text = format_json(theory, rows) if args.format == "json" else format_iseq(theory, rows)
        _write(args.output, text)
    if args.diff:
        try:
            golden = parse_iseq(_read(args.diff), theory)
        except ParseError as exc:
            raise _Located(args.diff, exc) from None
        d = diff_sequents(rows, golden)
        if args.format == "json" and not args.output:
            _write(None, _dumps({"schema": "chulog.diff/1", "theory": theory.name, "ok": d.ok,
                                 "missing": [str(r) for r in d.missing],
                                 "unexpected": [str(r) for r in d.unexpected]}))
        elif d.ok:
            print(f"{theory.name}: {len(rows)} sequents match {args.diff}", file=sys.stderr)
        else:
            print(f"{theory.name}: sequent sets differ from {args.diff}")
            for line in d.lines():
                print(line)
        return EXIT_OK if d.ok else EXIT_FAIL
    return EXIT_OK


# -- check -------------------------------------------------------------------

def cmd_check(args) -> int:
    theory = _theory(args.theory)
    try:
        s = _structure(args.structure, args.model, theory)
        results = check_structure(theory, s)
    except (StructureError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = all(r.holds for _, r in results)
    if args.format == "json":
        rows = []
        for name, r in results:
            row = {"axiom": name, "status": "HOLDS" if r.holds else "FAILED", "checked": r.checked}
            if not r.holds:
                row.update(valuation=r.witness, lhs=r.lhs, rhs=r.rhs)
            rows.append(row)
        _write(None, _dumps({"schema": "chulog.check/1", "theory": theory.name,
                             "model": s.model.model_id, "ok": ok, "results": rows}))
    else:
        for name, r in results:
            if r.holds:
                print(f"{name:<20} HOLDS")
            else:
                val = ", ".join(f"{k}={v}" for k, v in (r.witness or {}).items())
                print(f"{name:<20} FAILED  at {val or '()'}: hypotheses {r.lhs} not below conclusion {r.rhs}")
    return EXIT_OK if ok else EXIT_FAIL


# -- search ------------------------------------------------------------------

def _search_text(label: str, model_id: str, res: SearchResult) -> list[str]:
    if not res.found:
        return [f"{label} on {model_id}: {res.message} ({res.examined} examined)"]
    lines = [f"{label} on {model_id}: countermodel found ({res.examined} examined)"]
    obj = res.structure.to_json()
    for sort, dom in obj["domains"].items():
        lines.append(f"  {sort} = {{{', '.join(dom)}}}")
    for c, v in obj["consts"].items():
        lines.append(f"  {c} = {v}")
    for f, table in obj["funcs"].items():
        for k, v in table.items():
            lines.append(f"  {f}({k}) = {v}")
    for p, table in obj["preds"].items():
        for k, v in table.items():
            lines.append(f"  {p}({k}) = {v}")
    if res.witness:
        lines.append("  at " + ", ".join(f"{k}={v}" for k, v in res.witness.items()))
    return lines


def cmd_search(args) -> int:
    targets: list[tuple[str, object, object]] = []
    if args.law:
        if args.law not in LAW_INDEX:
            raise UsageError(f"unknown law {args.law!r}")
        targets.append((args.law, LAW_INDEX[args.law], None))
    if args.sequent:
        try:
            targets.append((args.sequent, parse_sequent(args.sequent), None))
        except ParseError as exc:
            print(f"<sequent>:{exc.line}:{exc.col}: {exc.message}", file=sys.stderr)
            return EXIT_FAIL
    if args.theory:
        theory = _theory(args.theory)
        names = [args.axiom] if args.axiom else [ax.name for ax in theory.axioms]
        for name in names:
            try:
                theory.axiom(name)
            except (KeyError, TheoryError):
                raise UsageError(f"theory {theory.name} has no axiom {name!r}") from None
            targets.append((f"{theory.name}.{name}", name, theory))
    elif args.axiom:
        raise UsageError("--axiom needs a theory file")
    if not targets:
        raise UsageError("search needs a theory file, --law or --sequent")
    models = _models(args.model or ["all"])
    capped = False
    out_json, out_text = [], []
    for label, target, theory in targets:
        for mid in models:
            try:
                res = search_countermodel(target, mid, theory=theory, max_domain=args.max_domain, cap=args.cap)
            except EvalError as exc:
                raise UsageError(str(exc)) from None
            capped |= res.capped
            out_json.append({"target": label, "model": mid, **res.to_json()})
            out_text.extend(_search_text(label, mid, res))
    if args.format == "json":
        _write(None, _dumps({"schema": "chulog.search-report/1", "results": out_json}))
    else:
        print("\n".join(out_text))
    return EXIT_FAIL if capped else EXIT_OK


# -- models ------------------------------------------------------------------

def cmd_models(args) -> int:
    rows = []
    for mid in all_model_ids():
        m = model_by_id(mid)
        rows.append({"id": mid, "elements": len(m.elements()), "exhaustive": m.exhaustive})
    lattices = [{"id": z, "size": lattice_by_id(z).size} for z in ZOO]
    if args.format == "json":
        _write(None, _dumps({"schema": "chulog.models/1", "lattices": lattices, "models": rows}))
    else:
        for r in rows:
            sweep = "exhaustive" if r["exhaustive"] else "grid + random"
            print(f"{r['id']:<24} {r['elements']:>4} elements  {sweep}")
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    default_format = os.environ.get(FORMAT_ENV, "text")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default=default_format,
                     help=f"output format (default from ${FORMAT_ENV}, else text)")
    p = argparse.ArgumentParser(prog="chulog", description="Affine logic over Chu constructions.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", parents=[fmt], help="parse a formula file or theory and dump the AST")
    sp.add_argument("path", nargs="?")
    sp.add_argument("-e", "--expr", help="parse this text instead of a file")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("eval", parents=[fmt], help="evaluate a formula in a structure")
    sp.add_argument("formula")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--theory")
    sp.add_argument("--model", help="override the model named in the structure")
    sp.add_argument("--let", action="append", metavar="VAR=ELEMENT")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("laws", parents=[fmt], help="check a law suite against models")
    sp.add_argument("--suite", default="all", help="core, chu-special, exponential, extra, all or a law name")
    sp.add_argument("--model", action="append", help="model id, repeatable; 'all' for every builtin")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_laws)

    sp = sub.add_parser("translate", parents=[fmt], help="standard interpretation of a theory")
    sp.add_argument("theory")
    sp.add_argument("-o", "--output")
    sp.add_argument("--diff", metavar="GOLDEN", help="compare with a golden .iseq file")
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("check", parents=[fmt], help="check a structure against a theory")
    sp.add_argument("theory")
    sp.add_argument("structure")
    sp.add_argument("--model")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("search", parents=[fmt], help="search for a finite countermodel")
    sp.add_argument("theory", nargs="?")
    sp.add_argument("--axiom")
    sp.add_argument("--law")
    sp.add_argument("--sequent")
    sp.add_argument("--model", action="append")
    sp.add_argument("--max-domain", type=int, default=3)
    sp.add_argument("--cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("models", parents=[fmt], help="list the builtin models")
    sp.set_defaults(func=cmd_models)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    if os.environ.get(FORMAT_ENV, "text") not in ("text", "json"):
        print(f"chulog: ${FORMAT_ENV} must be text or json", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("chulog: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _Located as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, LatticeError, ModelError) as exc:
        print(f"chulog: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
