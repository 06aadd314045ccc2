"""Command-line interface: ``relindet run|diagram|builtin|check``.

Exit status is 0 on success, 1 when a scenario fails validation and 2 on a
runtime error (unreadable input, failed evaluation, unwritable output).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .diagram import render_diagram
from .engine import run, use_color
from .errors import RelindetError, ScenarioError
from .randomness import SEED_BITS
from .scenario import BUILTINS, Scenario, builtin_text, parse_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


class _Failure(Exception):
    def __init__(self, code: int, lines: list[str]):
        super().__init__(lines)
        self.code = code
        self.lines = lines


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**SEED_BITS:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value >= 0:
        raise argparse.ArgumentTypeError("tolerance must be non-negative")
    return value


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise _Failure(EXIT_RUNTIME, [f"cannot read {path}: {exc}"]) from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Failure(EXIT_RUNTIME, [f"cannot write {path}: {exc}"]) from None


def _load(path: str, tolerance: float | None = None) -> Scenario:
    text = _read(path)
    try:
        if tolerance is None:
            return parse_scenario(text)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            return parse_scenario(text)  # reports the syntax error with its position
        if isinstance(doc, dict):
            doc["tolerance"] = tolerance
        return parse_scenario(doc)
    except ScenarioError as exc:
        name = "<stdin>" if path == "-" else path
        raise _Failure(EXIT_INVALID, [f"{name}: {issue}" for issue in exc.issues]) from None


def _cmd_run(args) -> int:
    s = _load(args.file, args.tolerance)
    try:
        report = run(s, seed=args.seed, timing=args.timing)
    except (RelindetError, ValueError) as exc:
        raise _Failure(EXIT_RUNTIME, [f"run failed: {exc}"]) from None
    if args.format == "structured":
        _write(args.output, report.to_json())
    else:
        color = args.output in (None, "-") and use_color(sys.stdout)
        _write(args.output, report.to_text(color=color))
    return EXIT_OK


def _cmd_diagram(args) -> int:
    s = _load(args.file, args.tolerance)
    try:
        svg = render_diagram(s, run(s, seed=args.seed))
    except (RelindetError, ValueError) as exc:
        raise _Failure(EXIT_RUNTIME, [f"diagram failed: {exc}"]) from None
    _write(args.output, svg)
    return EXIT_OK


def _cmd_builtin(args) -> int:
    if args.list:
        _write(None, "".join(f"{n}\n" for n in BUILTINS))
        return EXIT_OK
    if args.name is None:
        raise _Failure(EXIT_RUNTIME, ["builtin: a scenario name is required (see --list)"])
    _write(args.output, builtin_text(args.name))
    return EXIT_OK


def _cmd_check(args) -> int:
    s = _load(args.file, args.tolerance)
    print(f"ok: {s.name or args.file} ({len(s.queries)} queries)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None,
                        help="override the scenario's RNG seed (unsigned 64-bit)")
    common.add_argument("--tolerance", type=_tolerance, default=None, metavar="E",
                        help="override the scenario's geometric tolerance")

    parser = argparse.ArgumentParser(
        prog="relindet",
        description="Evaluate relative-indeterminacy scenarios on 1+1D space-time.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("run", parents=[common], help="evaluate a scenario and print its report")
    p.add_argument("file", help="scenario file, or - for standard input")
    p.add_argument("--format", choices=("text", "structured"), default="text",
                   help="text summary or structured JSON report")
    p.add_argument("--timing", action="store_true",
                   help="record per-query wall time (makes reports non-reproducible)")
    p.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("diagram", parents=[common], help="render a space-time diagram as SVG")
    p.add_argument("file", help="scenario file, or - for standard input")
    p.add_argument("-o", "--output", required=True, help="SVG output path (- for stdout)")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("builtin", help="print a built-in scenario document")
    p.add_argument("name", nargs="?", choices=BUILTINS)
    p.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")
    p.add_argument("--list", action="store_true", help="list the built-in scenarios")
    p.set_defaults(func=_cmd_builtin)

    p = sub.add_parser("check", parents=[common], help="validate a scenario without running it")
    p.add_argument("file", help="scenario file, or - for standard input")
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Failure as exc:
        for line in exc.lines:
            print(line, file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
