"""Command-line driver: parse a scenario, build its model, check, report.

Exit codes: 0 all checked invariants hold, 1 a violation was found,
2 usage/parse/semantic error, 3 state limit exceeded or model integrity
error. Stdout carries only the report; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (CheckerError, ConfigurationError, ModelIntegrityError,
                     ReplayDocumentError)
from .kernel import CheckOptions, Verdict, check
from .models import build_system, get_model, model_names
from .reporting import render_structured, render_text, replay
from .scenario import ScenarioError, parse_scenario, validate_semantics

_EXIT_BY_VERDICT = {
    Verdict.PASS: 0,
    Verdict.VIOLATION: 1,
    Verdict.LIMIT_EXCEEDED: 3,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apscheck",
        description="Explicit-state safety checker for the built-in "
                    "permission-system models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="check a scenario file")
    p_check.add_argument("scenario", type=Path, help="scenario file to check")
    p_check.add_argument("--format", choices=("text", "json"), default="text",
                         help="report format (default: text)")
    p_check.add_argument("--max-states", type=int, default=None, metavar="N",
                         help="override the scenario's state limit")
    p_check.add_argument("--stats-only", action="store_true",
                         help="disable invariants and report reachability "
                              "statistics only")
    p_check.add_argument("--replay", type=Path, default=None, metavar="FILE",
                         help="validate a previously saved JSON report "
                              "against this scenario's system")

    sub.add_parser("list-models", help="list built-in models and their "
                                       "parameters and invariants")
    return parser


def _read_text(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _cmd_check(args: argparse.Namespace) -> int:
    try:
        source = _read_text(args.scenario)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read {args.scenario}: {exc}", file=sys.stderr)
        return 2
    try:
        scenario = parse_scenario(source)
    except ScenarioError as exc:
        print(f"{args.scenario}:{exc}", file=sys.stderr)
        return 2
    for finding in validate_semantics(scenario):
        if finding.severity == "warning":
            print(f"{args.scenario}: warning: {finding.message}", file=sys.stderr)

    max_states = scenario.max_states
    if args.max_states is not None:
        if args.max_states < 1:
            print("error: --max-states must be at least 1", file=sys.stderr)
            return 2
        max_states = args.max_states

    try:
        system = build_system(scenario)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.replay is not None:
        return _cmd_replay(args, system)

    options = CheckOptions(max_states=max_states,
                           check_invariants=not args.stats_only)
    try:
        report = check(system, options)
    except CheckerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if isinstance(exc, ModelIntegrityError) else 2
    render = render_structured if args.format == "json" else render_text
    sys.stdout.write(render(report))
    return _EXIT_BY_VERDICT[report.verdict]


def _cmd_replay(args: argparse.Namespace, system) -> int:
    try:
        document = _read_text(args.replay)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read {args.replay}: {exc}", file=sys.stderr)
        return 2
    try:
        result = replay(document, system)
    except ReplayDocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if result:
        print(f"replay: valid against model {system.name}")
        return 0
    print(f"replay: divergent at step {result.divergent_step}: {result.reason}")
    return 1


def _cmd_list_models() -> int:
    for name in model_names():
        info = get_model(name)
        params = ", ".join(info.params) if info.params else "-"
        invariants = ", ".join(info.invariants)
        print(f"{name}  params: {params}  invariants: {invariants}")
    return 0


def main(argv: "list[str] | None" = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-models":
        return _cmd_list_models()
    return _cmd_check(args)


if __name__ == "__main__":
    sys.exit(main())
