"""Command-line entry point: validate, convert, view and stats over TermStore files.

Exit status: 0 success, 1 validation violations (or a forced export), 2 usage,
I/O or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import store
from .ddl import emit_ddl, map_schema
from .er import ERError, ViolationReport
from .rdf import to_ntriples
from .tbx import InvalidInstanceError, export_tbx, import_tbx
from .terminology import Approach, terminology_schema, validate_termbase, view

EXIT_OK, EXIT_VIOLATIONS, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.buffer.read().decode("utf-8")
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def _write_text(path: str, text: str) -> None:
    data = text.encode("utf-8")
    if path == "-":
        sys.stdout.flush()
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None


def _load_store(path: str):
    try:
        return store.loads(_read_text(path), terminology_schema())
    except ERError as exc:
        raise CliError(f"{path}: {exc}") from None


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        inst, dups = store.parse(_read_text(args.store), terminology_schema())
    except ERError as exc:
        raise CliError(f"{args.store}: {exc}") from None
    report = ViolationReport(dups + list(validate_termbase(inst)))
    if not report:
        print("OK: 0 violations")
        return EXIT_OK
    sys.stdout.write(report.render())
    return EXIT_VIOLATIONS


def cmd_convert(args: argparse.Namespace) -> int:
    if args.to_format == "ntriples" and not args.base:
        raise CliError("--base is required for ntriples output")
    if args.from_format == "store":
        inst = _load_store(args.input)
    else:
        try:
            inst = import_tbx(_read_text(args.input))
        except ERError as exc:
            raise CliError(f"{args.input}: {exc}") from None

    status = EXIT_OK
    if args.to_format == "store":
        out = store.dumps(inst)
    elif args.to_format == "ddl":
        out = emit_ddl(map_schema(terminology_schema()))
    elif args.to_format == "ntriples":
        try:
            out = to_ntriples(inst, args.base)
        except ERError as exc:
            raise CliError(str(exc)) from None
    else:
        report = validate_termbase(inst)
        try:
            out, loss = export_tbx(inst, args.title, force=args.force)
        except InvalidInstanceError as exc:
            sys.stderr.write(exc.report.render())
            hint = " (only conditional; rerun with --force)" if not report.of_kind(*_HARD_KINDS) else ""
            sys.stderr.write(f"export refused: {len(exc.report)} violation(s){hint}\n")
            return EXIT_VIOLATIONS
        if report:
            sys.stderr.write(report.render())
            status = EXIT_VIOLATIONS
        if loss:
            sys.stderr.write(loss.render())
    _write_text(args.output, out)
    return status


_HARD_KINDS = ("below-min", "above-max", "dangling-ref", "duplicate-id", "bad-attribute")


def cmd_view(args: argparse.Namespace) -> int:
    inst = _load_store(args.store)
    _write_text("-", store.dumps(view(inst, Approach(args.approach)).instance))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    inst = _load_store(args.store)
    schema = inst.schema
    counts = inst.counts()
    width = max(len(name) for name in counts)
    lines = ["entity types"]
    lines += [f"  {name:<{width}}  {counts[name]}" for name in sorted(et.name for et in schema.entity_types)]
    lines.append("associations")
    lines += [f"  {name:<{width}}  {counts[name]}" for name in sorted(a.name for a in schema.associations)]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termcore", description="Validate, convert and project terminology stores.", allow_abbrev=False
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check cardinalities and terminology rules", allow_abbrev=False)
    p.add_argument("store")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between store, TBX, N-Triples and DDL", allow_abbrev=False)
    p.add_argument("input", help="input path, '-' for stdin")
    p.add_argument("output", help="output path, '-' for stdout")
    p.add_argument("--from", dest="from_format", choices=["tbx", "store"], required=True)
    p.add_argument("--to", dest="to_format", choices=["tbx", "store", "ntriples", "ddl"], required=True)
    p.add_argument("--base", help="base IRI for ntriples output")
    p.add_argument("--title", default="Terminology", help="TBX document title")
    p.add_argument("--force", action="store_true", help="export TBX despite conditional violations")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("view", help="print one approach's projection as a store", allow_abbrev=False)
    p.add_argument("store")
    p.add_argument("--approach", required=True, choices=[a.value for a in Approach])
    p.set_defaults(func=cmd_view)

    p = sub.add_parser("stats", help="count entities and links", allow_abbrev=False)
    p.add_argument("store")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
