"""Batch front end: ``nomeq {check,prove,rewrite,eq,models,interp}``.

Exit status is 0 on success, 1 when the answer is negative (invalid theory,
``Unknown`` verdict, audit violation) and 2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .errors import NomeqError
from .nominal import Abstraction
from .presentations import (
    NominalContext,
    Presentation,
    VariableContext,
    builtin_lambda,
    builtin_monoid,
    parse_presentation,
    validate,
)
from .syntax import TokenStream, parse_term, read_atom_tuple, read_term, read_var_context, tokenize
from .terms import Term, show

BUILTINS = {"builtin:lambda": builtin_lambda, "builtin:monoid": builtin_monoid}


class InputError(Exception):
    """Unreadable or malformed input (exit status 2)."""


def load_theory(source: str, strict: bool = True) -> Presentation:
    if source in BUILTINS:
        return BUILTINS[source]()
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None
    return parse_presentation(text, strict=strict)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def parse_context(text: str) -> NominalContext:
    """``[a b] (x:1, y:0)``; either part may be omitted."""
    ts = TokenStream(tokenize(text))
    atoms = read_atom_tuple(ts) if ts.at("[") else ()
    vs = VariableContext(read_var_context(ts) if ts.at("(") else ())
    if not ts.done():
        ts.error(f"trailing input {ts.peek.text!r}")
    return NominalContext(atoms, vs)


def parse_binding(text: str, th: Presentation) -> tuple[str, Abstraction]:
    """``x=[c]TERM`` binds ``x`` to the abstraction ``<c>TERM``."""
    ts = TokenStream(tokenize(text))
    name = ts.ident("a variable").text
    ts.expect("=")
    binder = read_atom_tuple(ts) if ts.at("[") else ()
    body = read_term(ts, th.families)
    if not ts.done():
        ts.error(f"trailing input {ts.peek.text!r}")
    return name, Abstraction(binder, body)


def parse_judgements(text: str, th: Presentation) -> list[tuple[Term, Term]]:
    """One ``lhs = rhs`` per line; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        ts = TokenStream(tokenize(raw, line_offset=lineno - 1))
        if ts.done():
            continue
        lhs = read_term(ts, th.families)
        ts.expect("=")
        rhs = read_term(ts, th.families)
        if not ts.done():
            ts.error(f"trailing input {ts.peek.text!r}")
        out.append((lhs, rhs))
    return out


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        for line in lines:
            print(line)


# ------------------------------------------------------------------ subcommands


def cmd_check(args) -> int:
    th = load_theory(args.theory, strict=False)
    report = validate(th)
    lines = [f"theory {th.name}: {len(th.signature)} operators, {len(th.equations)} equations"] + report.lines()
    lines.append("valid" if report.valid else "invalid")
    payload = {
        "theory": th.name,
        "valid": report.valid,
        "equations": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in report.checks],
    }
    _emit(args, payload, lines)
    return 0 if report.valid else 1


def cmd_prove(args) -> int:
    from .snel import check, parse_proof

    th = load_theory(args.theory)
    proof = parse_proof(_read_text(args.proof), th)
    try:
        j = check(proof, th)
    except NomeqError as exc:
        _emit(args, {"accepted": False, "error": type(exc).__name__, "detail": str(exc)},
              [f"rejected: {type(exc).__name__}: {exc}"])
        return 1
    _emit(args, {"accepted": True, "judgement": str(j)}, [str(j)])
    return 0


def cmd_rewrite(args) -> int:
    from .snr import Equal, equal_bounded

    th = load_theory(args.theory)
    s = parse_term(args.source, th.families)
    t = parse_term(args.target, th.families)
    v = equal_bounded(s, t, th, max_depth=args.depth, node_budget=args.budget, pool_size=args.pool, jobs=args.jobs)
    if isinstance(v, Equal):
        steps = [
            {"equation": r.equation, "direction": r.direction, "position": list(r.position),
             "atoms": [str(a) for a in r.atoms], "term": show(u)}
            for r, u in v.path.steps
        ]
        text = v.path.format()
        _emit(args, {"verdict": "Equal", "steps": steps, "stats": v.stats},
              ([text] if text else []) + [f"EQUAL in {len(v.path)} steps"])
        return 0
    stats = " ".join(f"{k}={val}" for k, val in sorted(v.stats.items()))
    _emit(args, {"verdict": "Unknown", "stats": v.stats}, [f"UNKNOWN {stats}"])
    return 1


def cmd_eq(args) -> int:
    from .semantics import check_satisfaction_sampled

    th = load_theory(args.theory)
    if not th.has_equation(args.equation):
        raise InputError(f"no equation named {args.equation}")
    report = check_satisfaction_sampled(
        th, th.equation(args.equation), samples=args.samples, max_depth=args.depth,
        node_budget=args.budget, seed=args.seed, pool_size=args.pool,
    )
    payload = {
        "equation": report.equation,
        "bounds": report.bounds,
        "samples": [
            {"index": r.index, "seed": r.seed, "env": r.environment.digest(), "verdict": r.verdict,
             "path_length": r.path_length}
            for r in report.results
        ],
    }
    _emit(args, payload, report.lines())
    return 0 if report.all_confirmed else 1


def cmd_models(args) -> int:
    from .birkhoff import enumerate_models, soundness_audit

    th = load_theory(args.theory)
    models = enumerate_models(th, args.max_size, allow_large=args.allow_large, jobs=args.jobs)
    judgements = parse_judgements(_read_text(args.judgements), th) if args.judgements else []
    violations = soundness_audit(th, judgements, args.max_size, models=models)
    lines = [f"{len(models)} models up to size {args.max_size}"]
    lines += [m.to_json() for m in models]
    if args.judgements:
        lines.append(f"audit: {len(judgements)} judgements, {len(violations)} violations")
        lines += [str(v) for v in violations]
    payload = {
        "count": len(models),
        "models": [json.loads(m.to_json()) for m in models],
        "violations": [str(v) for v in violations],
    }
    _emit(args, payload, lines)
    return 1 if violations else 0


def cmd_interp(args) -> int:
    from .semantics import Environment, identity_environment, interpret

    th = load_theory(args.theory)
    ctx = parse_context(args.context)
    t = parse_term(args.term, th.families)
    if args.bind or args.d is not None:
        base = identity_environment(ctx)
        entries = base.mapping
        entries.update(parse_binding(b, th) for b in args.bind)
        d = read_atom_tuple(TokenStream(tokenize(args.d))) if args.d is not None else base.d
        env = Environment.of(entries, d)
    else:
        env = identity_environment(ctx)
    result = interpret(ctx, t, env)
    _emit(args, {"environment": str(env), "result": show(result)}, [show(result)])
    return 0


# ------------------------------------------------------------------ wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nomeq",
        description="Nominal equational theories: validation, proof checking, rewriting, models.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("theory", help="theory file, or builtin:lambda / builtin:monoid")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--jobs", type=int, default=1, choices=range(1, 65), metavar="N", help="worker processes")
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--depth", type=int, default=6, help="maximum rewrite path length")
    search.add_argument("--budget", type=int, default=100_000, help="maximum number of visited terms")
    search.add_argument("--pool", type=int, default=2, help="fresh atoms offered to unconstrained equation atoms")

    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = sub.add_parser("check", parents=[common], formatter_class=fmt, help="parse and validate a theory")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("prove", parents=[common], formatter_class=fmt, help="check a proof script")
    p.add_argument("proof", help="proof script file")
    p.set_defaults(func=cmd_prove)
    p = sub.add_parser("rewrite", parents=[common, search], formatter_class=fmt, help="search a rewrite path")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_rewrite)
    p = sub.add_parser("eq", parents=[common, search], formatter_class=fmt,
                       help="sampled satisfaction of a named equation in the term model")
    p.add_argument("equation")
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(func=cmd_eq)
    p = sub.add_parser("models", parents=[common], formatter_class=fmt,
                       help="enumerate finite models of an atom-free theory")
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--allow-large", action="store_true", help="permit sizes above 4")
    p.add_argument("--judgements", help="file of 'lhs = rhs' lines to audit against the models")
    p.set_defaults(func=cmd_models)
    p = sub.add_parser("interp", parents=[common], formatter_class=fmt, help="interpret a term in the term model")
    p.add_argument("context", help="e.g. '[a] (x:1)'")
    p.add_argument("term")
    p.add_argument("--bind", action="append", default=[], metavar="x=[c]TERM", help="environment entry")
    p.add_argument("--d", metavar="[ATOMS]", help="atoms standing for the context atoms")
    p.set_defaults(func=cmd_interp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (InputError, NomeqError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
