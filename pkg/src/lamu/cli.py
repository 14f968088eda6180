"""Command-line interface: run, check, denote, the property-suite
subcommands, and a small REPL.

Exit codes: 0 success, 1 the program normalized to fail, 2 usage or
parse or type errors, 3 property-suite counterexample.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Dict, List, Optional

from . import denot, reduction
from .concrete import ParseError, SourceFile, parse_file, pretty_program
from .generator import STRATIFIED_SIGNATURE, Generator, GeneratorConfig
from .reduction import evaluate, reachable_normal_forms
from .syntax import CoherenceError, LamuError, Program, free_vars
from .typecheck import (
    Type, TypeCheckError, ambient_context, base_names_used,
    default_signature, infer, subject_reduction_check,
)

EXIT_OK = 0
EXIT_FAILED_PROGRAM = 1
EXIT_USER_ERROR = 2
EXIT_COUNTEREXAMPLE = 3


def _default_seed() -> int:
    try:
        return int(os.environ.get("LUNI_SEED", "0"))
    except ValueError:
        return 0


def _load(path: str) -> SourceFile:
    with open(path, encoding="utf-8") as handle:
        return parse_file(handle.read())


def _print_trace(trace, out):
    for ts in trace:
        print(f"#{ts.index} [{ts.rule}] thread={ts.thread}", file=out)
        print(pretty_program(ts.after), file=out)


def _type_text(ty: Type) -> str:
    return repr(ty)


def _source_text(src: SourceFile, program: Program) -> str:
    lines = []
    for name, ty in src.signature.items():
        lines.append(f"cons {name} : {_type_text(ty)}.")
    for name, size in src.base_sizes.items():
        lines.append(f"base {name} = {size}.")
    lines.append(pretty_program(program))
    return "\n".join(lines) + "\n"


def _write_counterexample(suite: str, index: int, src: SourceFile,
                          program: Program, out) -> None:
    text = _source_text(src, program)
    path = f"counterexample-{suite}-{index}.luni"
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    print(f"counterexample (sample {index}), written to {path}:", file=out)
    print(text, file=out, end="")


def _generator_source(config: GeneratorConfig) -> SourceFile:
    src = SourceFile()
    src.signature = dict(config.signature)
    return src


# ---------------------------------------------------------------------------
# Subcommands

def cmd_run(args, out) -> int:
    src = _load(args.file)
    result = evaluate(src.program, fuel=args.fuel, strategy=args.strategy,
                      seed=args.seed)
    if args.trace:
        _print_trace(result.trace, out)
    if not result.normal:
        print(f"out of fuel after {result.steps} steps:", file=out)
    print(pretty_program(result.program), file=out)
    if result.normal and result.program.is_fail:
        return EXIT_FAILED_PROGRAM
    return EXIT_OK


def cmd_check(args, out) -> int:
    src = _load(args.file)
    sig = default_signature(src.signature)
    typing = infer(ambient_context(src.program), sig, src.program)
    print(_type_text(typing.type), file=out)
    for name in sorted(typing.gamma):
        if name in free_vars(src.program):
            print(f"  {name} : {_type_text(typing.gamma[name])}", file=out)
    return EXIT_OK


def _model_for(src: SourceFile, cap: int, typing) -> denot.Model:
    sizes = dict(src.base_sizes)
    for name in base_names_used(typing):
        sizes.setdefault(name, 2)
    sizes.pop("unit", None)
    sig = default_signature(src.signature)
    return denot.Model(sizes, sig, cap=cap)


def cmd_denote(args, out) -> int:
    src = _load(args.file)
    sig = default_signature(src.signature)
    typing = infer(ambient_context(src.program), sig, src.program)
    model = _model_for(src, args.cap, typing)
    sem = denot.denote_toplevel(typing.node, model, typing.gamma)
    print(f"type: {_type_text(typing.type)}", file=out)
    print(f"denotation ({len(sem)} element(s)):", file=out)
    for item in sorted(map(repr, sem)):
        print(f"  {item}", file=out)
    return EXIT_OK


def cmd_test_confluence(args, out) -> int:
    config = GeneratorConfig(seed=args.seed, max_depth=args.depth)
    gen = Generator(config)
    stream = gen.programs()
    src = _generator_source(config)
    for i in range(args.samples):
        p = next(stream)
        exploration = reachable_normal_forms(p, fuel=args.fuel,
                                             max_states=args.max_states)
        forms = list(exploration.normal_forms)
        if len(forms) > 1:
            _write_counterexample("confluence", i, src, p, out)
            return EXIT_COUNTEREXAMPLE
    print(f"confluence: {args.samples} samples, 0 counterexamples", file=out)
    return EXIT_OK


def cmd_test_soundness(args, out) -> int:
    config = GeneratorConfig(seed=args.seed, max_depth=args.depth,
                             allow_absloc=False, well_typed=True,
                             signature=dict(STRATIFIED_SIGNATURE))
    gen = Generator(config)
    stream = gen.programs()
    src = _generator_source(config)
    sig = default_signature(config.signature)
    checked = 0
    i = 0
    while checked < args.samples:
        p = next(stream)
        i += 1
        try:
            typing = infer(ambient_context(p), sig, p)
            model = _model_for(src, args.cap, typing)
            verdict = denot.soundness_check(p, model, fuel=args.fuel)
        except (denot.TooLarge, denot.DenotError):
            continue
        checked += 1
        if not verdict.ok:
            _write_counterexample("soundness", i, src, p, out)
            return EXIT_COUNTEREXAMPLE
    print(f"soundness: {checked} samples, 0 counterexamples", file=out)
    return EXIT_OK


def cmd_test_subject_reduction(args, out) -> int:
    config = GeneratorConfig(seed=args.seed, max_depth=args.depth,
                             allow_absloc=False, well_typed=True)
    gen = Generator(config)
    stream = gen.programs()
    src = _generator_source(config)
    sig = default_signature(config.signature)
    for i in range(args.samples):
        p = next(stream)
        verdict = subject_reduction_check(ambient_context(p), sig, p,
                                          fuel=args.fuel)
        if not verdict.ok:
            _write_counterexample("subject-reduction", i, src, p, out)
            return EXIT_COUNTEREXAMPLE
    print(f"subject reduction: {args.samples} samples, 0 counterexamples",
          file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# REPL

def cmd_repl(args, out) -> int:
    from .concrete import _Parser, tokenize

    state = SourceFile()
    definitions: Dict[str, object] = {}
    print("type a program, a declaration, or :trace/:type/:denote/:quit",
          file=out)
    while True:
        try:
            line = input("luni> ")
        except EOFError:
            print("", file=out)
            return EXIT_OK
        line = line.strip()
        if not line:
            continue
        try:
            if line in (":q", ":quit"):
                return EXIT_OK
            if line.startswith(":"):
                _repl_meta(line, state, definitions, args, out)
                continue
            if line.split()[0] in ("cons", "base", "def"):
                parsed = _Parser(tokenize(line), definitions).parse_file()
                state.signature.update(parsed.signature)
                state.base_sizes.update(parsed.base_sizes)
                definitions.update(parsed.definitions)
                if not parsed.program.is_fail:
                    _repl_run(parsed.program, out)
                continue
            parser = _Parser(tokenize(line), definitions)
            program = parser.parse_program()
            parser.expect("eof")
            _repl_run(program, out)
        except LamuError as exc:
            print(f"error: {exc}", file=out)


def _repl_run(program: Program, out) -> None:
    result = evaluate(program, fuel=1000)
    prefix = "" if result.normal else "out of fuel: "
    print(prefix + pretty_program(result.program), file=out)


def _repl_meta(line: str, state: SourceFile, definitions, args, out) -> None:
    from .concrete import _Parser, tokenize

    command, _, rest = line.partition(" ")
    if command not in (":trace", ":type", ":denote"):
        print(f"unknown command {command}", file=out)
        return
    parser = _Parser(tokenize(rest), definitions)
    program = parser.parse_program()
    parser.expect("eof")
    if command == ":trace":
        result = evaluate(program, fuel=1000)
        _print_trace(result.trace, out)
        print(pretty_program(result.program), file=out)
        return
    sig = default_signature(state.signature)
    typing = infer(ambient_context(program), sig, program)
    if command == ":type":
        print(_type_text(typing.type), file=out)
        return
    model = _model_for(state, 4096, typing)
    sem = denot.denote_toplevel(typing.node, model, typing.gamma)
    for item in sorted(map(repr, sem)) or ["(empty)"]:
        print(f"  {item}", file=out)


# ---------------------------------------------------------------------------
# Argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lamu",
        description="evaluator, type checker, and semantics test harness")
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    run = sub.add_parser("run", help="evaluate a program file")
    run.add_argument("file")
    run.add_argument("--fuel", type=int, default=1000)
    run.add_argument("--strategy", choices=reduction.STRATEGIES,
                     default="leftmost")
    run.add_argument("--trace", action="store_true")
    run.add_argument("--seed", type=int, default=seed)
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="infer the program's type")
    check.add_argument("file")
    check.set_defaults(func=cmd_check)

    den = sub.add_parser("denote", help="compute the finite denotation")
    den.add_argument("file")
    den.add_argument("--cap", type=int, default=4096)
    den.set_defaults(func=cmd_denote)

    for name, func, extra in (
            ("test-confluence", cmd_test_confluence,
             {"samples": 500, "fuel": 200}),
            ("test-soundness", cmd_test_soundness, {"samples": 200, "fuel": 50}),
            ("test-subject-reduction", cmd_test_subject_reduction,
             {"samples": 300, "fuel": 200})):
        suite = sub.add_parser(name, help=f"property suite: {name[5:]}")
        suite.add_argument("--samples", type=int, default=extra["samples"])
        suite.add_argument("--seed", type=int, default=seed)
        suite.add_argument("--fuel", type=int, default=extra["fuel"])
        suite.add_argument("--depth", type=int, default=3)
        if name == "test-confluence":
            suite.add_argument("--max-states", type=int, default=10000)
        if name == "test-soundness":
            suite.add_argument("--cap", type=int, default=4096)
        suite.set_defaults(func=func)

    repl = sub.add_parser("repl", help="interactive loop")
    repl.set_defaults(func=cmd_repl)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USER_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, sys.stdout)
    except (ParseError, TypeCheckError, CoherenceError, FileNotFoundError,
            denot.DenotError, denot.TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER_ERROR


if __name__ == "__main__":
    sys.exit(main())
