"""Command-line frontend: ``pervcoh SESSION [COMMAND ...]``."""

from __future__ import annotations

import argparse
import sys

from .commands import EXIT_INPUT, Command, Report, parse_command, run_command
from .report import emit_report
from .session import (
    InputError,
    SessionDocument,
    complex_to_dict,
    parse_input,
    serialize_complex,
    serialize_session,
)

__all__ = ["Command", "InputError", "Report", "SessionDocument", "complex_to_dict", "emit_report",
           "main", "parse_command", "parse_input", "run_command", "serialize_complex",
           "serialize_session"]


def _input_report(text: str, e: InputError) -> Report:
    payload = {"line": e.line, "column": e.column}
    return Report(text, "input-error", EXIT_INPUT, payload, error=e.message)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="pervcoh", description="Perverse coherent t-structures on affine schemes.")
    ap.add_argument("session", help="session document (TOML), or - for stdin")
    ap.add_argument("command", nargs="*",
                    help="one command line; without it the session's named commands run in order")
    ap.add_argument("--format", choices=["json", "human"], default="json")
    ap.add_argument("--timing", action="store_true", help="include wall-clock seconds in reports")
    # the global options may appear anywhere; everything else after the session is the command
    argv = list(sys.argv[1:] if argv is None else argv)
    glob, rest, i = [], [], 0
    while i < len(argv):
        t = argv[i]
        if t == "--timing" or t.startswith("--format=") or t in ("-h", "--help"):
            glob.append(t)
        elif t == "--format" and i + 1 < len(argv):
            glob += [t, argv[i + 1]]
            i += 1
        else:
            rest.append(t)
        i += 1
    args = ap.parse_args(glob + rest[:1])
    args.command = rest[1:]
    try:
        if args.session == "-":
            text = sys.stdin.read()
        else:
            with open(args.session, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        print(f"pervcoh: cannot read session: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        session = parse_input(text)
    except InputError as e:
        sys.stdout.write(emit_report(_input_report("parse", e), args.format))
        return EXIT_INPUT
    if args.command:
        report = run_command(session, " ".join(args.command))
        sys.stdout.write(emit_report(report, args.format, args.timing))
        return report.exit_code
    cmds = session.commands or {"validate": parse_command("validate", session)}
    reports = {name: run_command(session, cmd) for name, cmd in cmds.items()}
    if args.format == "json":
        data = {name: r.to_dict(args.timing) for name, r in reports.items()}
        sys.stdout.write(emit_report(data, "json"))
    else:
        for name, r in reports.items():
            sys.stdout.write(f"== {name}\n" + emit_report(r, "human", args.timing))
    return max(r.exit_code for r in reports.values())
