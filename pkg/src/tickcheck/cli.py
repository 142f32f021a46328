"""Command-line front end.

Subcommands: ``parse`` (syntax + structural checks), ``reach`` (state-space
statistics), ``check`` (LTL verification with counterexample printing),
``gen`` (compile a timed skeleton to a model file), ``bench`` (the Fischer
comparison grid).

Exit codes: 0 success / property holds; 1 property violated; 2 usage,
parse, or validation error; 3 state limit exceeded.  ``TICKCHECK_MAX_STATES``
supplies a default state limit where ``--max-states`` is accepted.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .bench import emit_table, run_benchmark
from .checking import render_trace, verify
from .explorer import LimitExceeded, explore_reachable
from .fischer import ALGORITHMS, METHODS, FischerConfig
from .generate import gen_ledm, gen_sedm
from .ltl import parse_ltl
from .model import render_model, validate_model
from .parser import ParseError, parse_model
from .skeleton import ValidationError, parse_skeleton

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _default_max_states(value: int | None) -> int | None:
    if value is not None:
        return value
    env = os.environ.get("TICKCHECK_MAX_STATES")
    return int(env) if env else None


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_model(path: str):
    m = parse_model(_read(path))
    problems = validate_model(m)
    if problems:
        raise ValidationError("; ".join(str(d) for d in problems))
    return m


def cmd_parse(args) -> int:
    m = _load_model(args.file)
    n_trans = sum(len(p.transitions) for p in m.processes)
    print(
        f"ok: {len(m.processes)} processes, {len(m.channels)} channels, "
        f"{len(m.globals)} globals, {n_trans} transitions"
    )
    return EXIT_OK


def cmd_reach(args) -> int:
    m = _load_model(args.file)
    start = time.perf_counter()
    report = explore_reachable(m, _default_max_states(args.max_states))
    elapsed = time.perf_counter() - start
    print(f"states: {report.state_count}")
    print(f"transitions: {report.transition_count}")
    print(f"deadlocks: {report.deadlock_count}")
    print(f"max depth: {report.max_depth}")
    print(f"time: {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    m = _load_model(args.file)
    formula = parse_ltl(args.ltl)
    start = time.perf_counter()
    result = verify(m, formula, args.algo, _default_max_states(args.max_states))
    elapsed = time.perf_counter() - start
    print(
        f"product states: {result.stats.states}, "
        f"transitions: {result.stats.transitions}",
    )
    print(f"time: {elapsed:.3f}s", file=sys.stderr)
    try:
        import resource

        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0
        print(f"peak memory: {peak:.1f} MB", file=sys.stderr)
    except (ImportError, ValueError, OSError):
        pass
    if result.holds:
        print("holds")
        return EXIT_OK
    print("violated")
    print(render_trace(m, result.counterexample))
    return EXIT_VIOLATED


def cmd_gen(args) -> int:
    sk = parse_skeleton(_read(args.file))
    model = gen_ledm(sk) if args.method == "ledm" else gen_sedm(sk)
    text = render_model(model)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    grid = [
        FischerConfig(n, T, method, args.algo)
        for T in args.T
        for n in args.threads
        for method in METHODS
    ]
    records = run_benchmark(grid, _default_max_states(args.max_states))
    table = emit_table(records, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(table)
    else:
        print(table, end="")
    if any(r.verdict is None for r in records):
        return EXIT_LIMIT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="tickcheck")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and validate a model file")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("reach", help="explore the reachable state space")
    p.add_argument("file")
    p.add_argument("--max-states", type=int, default=None)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("check", help="verify an LTL property")
    p.add_argument("file")
    p.add_argument("--ltl", required=True, help="formula, e.g. 'G (c < 2)'")
    p.add_argument("--algo", choices=ALGORITHMS, default="ndfs")
    p.add_argument("--max-states", type=int, default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="compile a timed skeleton to a model")
    p.add_argument("file")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run the Fischer comparison grid")
    p.add_argument("--threads", type=_csv_ints, default=[1, 2])
    p.add_argument("--T", type=_csv_ints, default=[1, 2])
    p.add_argument("--algo", choices=ALGORITHMS, default="ndfs")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    p.add_argument("--max-states", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_bench)
    return top


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except LimitExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
