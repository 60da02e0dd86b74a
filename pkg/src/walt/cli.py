"""Command-line front end: ``walt compile | run | typecheck | list | sweep``."""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .combinators import REGISTRY, TypeMismatch
from .compiler import compile_def, interpret
from .corpus import corpus_source
from .derivations import Violation, check_derivation, derivation_from_json, derivation_to_json
from .formulas import show
from .reducer import LEFTMOST_OUTERMOST, STRATEGIES, normalize, trace
from .srn import (
    ArityError, SrnSyntaxError, arity, eval_def, eval_term, parse_program, parse_term, show_def,
    show_term,
)
from .terms import alpha_eq, app, print_term
from .words import decode_word, word

SCHEMA = 1
CORPUS = "@corpus"  # file argument naming the bundled samples
EXIT_OK, EXIT_USAGE, EXIT_TYPE, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def cache_dir() -> Path:
    return Path(os.environ.get("WALT_CACHE_DIR") or Path.home() / ".cache" / "walt")


def store_derivation(d) -> str:
    """Write a derivation under its content hash; returns the hash."""
    text = json.dumps(derivation_to_json(d), sort_keys=True)
    ref = hashlib.sha256(text.encode()).hexdigest()[:32]
    path = cache_dir() / f"{ref}.json"
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(text)
        tmp.replace(path)
    return ref


def _load_program(path: str | None) -> dict:
    try:
        text = corpus_source() if path in (None, CORPUS) else Path(path).read_text()
        return parse_program(text)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_USAGE)
    except (SrnSyntaxError, ArityError) as e:
        raise CliError(f"{path}: {e}", EXIT_USAGE)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"schema": SCHEMA, **payload}, indent=2))
    else:
        print(text)


# -- compile ------------------------------------------------------------------------------


def cmd_compile(args) -> int:
    defs = _load_program(args.file)
    if args.name not in defs:
        raise CliError(f"no definition named {args.name!r} in {args.file}", EXIT_USAGE)
    f = defs[args.name]
    try:
        c = compile_def(f)
    except (TypeMismatch, Violation) as e:
        raise CliError(f"type-check failed: {e}", EXIT_TYPE)
    ref = store_derivation(c.derivation) if c.derivation is not None else None
    payload = {
        "name": args.name,
        "source": show_def(f),
        "term": print_term(c.term),
        "formula": show(c.target.formula),
        "m": c.m,
        "clause": c.clause,
        "routing": c.routing,
        "derivation_ref": ref,
        "note": c.target.note or None,
    }
    text = (f"{args.name} := {show_def(f)}\n  clause {c.clause}, m = {c.m}, size {c.term.size}\n"
            f"  : {show(c.target.formula)}\n  derivation: {ref or c.target.note}")
    _emit(args, payload, text)
    return EXIT_OK


# -- run ------------------------------------------------------------------------------------


def _parse_sweep(spec: str) -> tuple[str, range]:
    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)=(\d+)\.\.(\d+)", spec)
    if not m:
        raise CliError(f"bad sweep {spec!r}; expected name=LO..HI", EXIT_USAGE)
    return m.group(1), range(int(m.group(2)), int(m.group(3)) + 1)


def _run_compiled(t, env, args) -> dict:
    ct = interpret(t, env)
    if args.trace:
        tr = trace(ct.term, max_steps=args.max_steps, strategy=args.strategy)
        with open(args.trace, "w") as fh:
            tr.dump_jsonl(fh)
        nf, steps, done = tr.final, len(tr), tr.reached_normal_form
    else:
        nf, steps, done = normalize(ct.term, max_steps=args.max_steps, strategy=args.strategy)
    return {"value": decode_word(nf) if done else None, "steps": steps, "exhausted": not done,
            "depth": ct.depth, "normal_form": nf}


def cmd_run(args) -> int:
    defs = _load_program(args.file)
    try:
        t = parse_term(args.term, defs)
    except (SrnSyntaxError, ArityError) as e:
        raise CliError(f"term: {e}", EXIT_USAGE)
    if args.sweep:
        return _sweep_term(t, args)
    try:
        oracle = eval_term(t) if args.mode in ("oracle", "both") else None
    except KeyError as e:
        raise CliError(f"unbound variable {e.args[0]!r}; run needs a closed term", EXIT_USAGE)
    payload: dict = {"term": show_term(t), "mode": args.mode}
    lines = []
    if oracle is not None:
        payload["oracle"] = oracle
        lines.append(f"oracle   {oracle}")
    code = EXIT_OK
    if args.mode in ("compiled", "both"):
        try:
            r = _run_compiled(t, {}, args)
        except KeyError as e:
            raise CliError(f"unbound variable {e.args[0]!r}; run needs a closed term", EXIT_USAGE)
        nf = r.pop("normal_form")
        payload["compiled"] = r
        lines.append(f"compiled {r['value'] if not r['exhausted'] else '?'}  "
                     f"({r['steps']} steps, depth {r['depth']})")
        if r["exhausted"]:
            lines.append(f"budget of {args.max_steps} steps exhausted")
            code = EXIT_BUDGET
        elif oracle is not None:
            equal = alpha_eq(nf, word(oracle))
            payload["equal"] = equal
            lines.append("EQUAL" if equal else "MISMATCH")
            code = EXIT_OK if equal else EXIT_MISMATCH
    _emit(args, payload, "\n".join(lines))
    return code


def _sweep_term(t, args) -> int:
    name, lengths = _parse_sweep(args.sweep)
    rows = []
    for n in lengths:
        value = (1 << n) - 1
        r = _run_compiled(t, {name: value}, args)
        if r["exhausted"]:
            print(f"budget exhausted at |{name}| = {n}", file=sys.stderr)
            return EXIT_BUDGET
        rows.append((n, r["steps"]))
    if args.json:
        _emit(args, {"term": show_term(t), "variable": name,
                     "rows": [{"length": n, "steps": s} for n, s in rows]}, "")
    else:
        print("length,steps")
        for n, s in rows:
            print(f"{n},{s}")
    return EXIT_OK


# -- typecheck -------------------------------------------------------------------------------


def cmd_typecheck(args) -> int:
    try:
        raw = json.loads(Path(args.derivation).read_text())
        d = derivation_from_json(raw)
    except OSError as e:
        raise CliError(f"cannot read {args.derivation}: {e.strerror}", EXIT_USAGE)
    except (ValueError, KeyError, TypeError) as e:
        raise CliError(f"malformed derivation: {e}", EXIT_USAGE)
    try:
        j = check_derivation(d)
    except Violation as e:
        _emit(args, {"ok": False, "rule": e.rule, "condition": e.condition, "message": str(e)},
              f"VIOLATION {e}")
        return EXIT_TYPE
    _emit(args, {"ok": True, "judgment": str(j)}, f"OK {j}")
    return EXIT_OK


# -- list --------------------------------------------------------------------------------------


def cmd_list(args) -> int:
    if args.json:
        _emit(args, {"combinators": [dict(e) for e in REGISTRY]}, "")
    else:
        for e in REGISTRY:
            params = ", ".join(e["params"])
            print(f"{e['name']}({params}) : {e['formula']}\n    {e['contract']}")
    return EXIT_OK


# -- sweep -------------------------------------------------------------------------------------


def _sweep_one(job: tuple) -> dict:
    name, src, bound, max_steps, strategy = job
    f = parse_program(src)[name]
    c = compile_def(f)
    k, l = arity(f)
    out = {"name": name, "runs": 0, "mismatches": [], "exhausted": [], "max_steps": 0}
    for args in itertools.product(range(bound), repeat=k + l):
        want = eval_def(f, args[:k], args[k:])
        nf, steps, done = normalize(app(c.term, *[word(a) for a in args]),
                                    max_steps=max_steps, strategy=strategy)
        out["runs"] += 1
        out["max_steps"] = max(out["max_steps"], steps)
        if not done:
            out["exhausted"].append(list(args))
        elif not alpha_eq(nf, word(want)):
            out["mismatches"].append({"args": list(args), "oracle": want, "got": decode_word(nf)})
    return out


def cmd_sweep(args) -> int:
    defs = _load_program(args.file)
    src = corpus_source() if args.file in (None, CORPUS) else Path(args.file).read_text()
    names = args.names or list(defs)
    missing = [n for n in names if n not in defs]
    if missing:
        raise CliError(f"unknown definitions: {', '.join(missing)}", EXIT_USAGE)
    jobs = [(n, src, args.bound, args.max_steps, args.strategy) for n in names]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    lines = [f"{r['name']:10} runs {r['runs']:6}  max steps {r['max_steps']:7}  "
             f"mismatches {len(r['mismatches'])}  exhausted {len(r['exhausted'])}" for r in results]
    _emit(args, {"bound": args.bound, "results": results}, "\n".join(lines))
    if any(r["mismatches"] for r in results):
        return EXIT_MISMATCH
    if any(r["exhausted"] for r in results):
        return EXIT_BUDGET
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--strategy", choices=STRATEGIES, default=LEFTMOST_OUTERMOST)
    common.add_argument("--max-steps", type=_positive, default=10_000_000)

    p = argparse.ArgumentParser(prog="walt", description="Compile and run safe recursion on notation "
                                "programs as typed lambda terms.")
    p.add_argument("--version", action="version", version=f"walt {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", parents=[common], help="compile a named definition")
    c.add_argument("file", help="program file, or @corpus for the bundled samples")
    c.add_argument("name")
    c.set_defaults(func=cmd_compile)

    r = sub.add_parser("run", parents=[common], help="evaluate a closed term")
    r.add_argument("file", help="program file, or @corpus for the bundled samples")
    r.add_argument("term")
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--oracle", dest="mode", action="store_const", const="oracle")
    mode.add_argument("--compiled", dest="mode", action="store_const", const="compiled")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    r.add_argument("--trace", metavar="PATH", help="write every reduction step as JSON lines")
    r.add_argument("--sweep", metavar="X=LO..HI",
                   help="step counts with X set to all-ones numerals of each length; CSV output")
    r.set_defaults(func=cmd_run, mode="both")

    t = sub.add_parser("typecheck", parents=[common], help="check a derivation JSON file")
    t.add_argument("derivation")
    t.set_defaults(func=cmd_typecheck)

    li = sub.add_parser("list", parents=[common], help="list the combinator registry")
    li.set_defaults(func=cmd_list)

    s = sub.add_parser("sweep", parents=[common], help="oracle against compiled code on an input grid")
    s.add_argument("file", nargs="?", help="program file (default: bundled samples)")
    s.add_argument("--names", nargs="*", help="definitions to check (default: all)")
    s.add_argument("--bound", type=_positive, default=8, help="every argument ranges below this")
    s.add_argument("--jobs", type=_positive, default=1)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"walt: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
