"""``mtx`` command line: validate, transform and pretty-print models.

Exit status is 0 on success, 1 when the input has errors, 2 for usage or
I/O problems.  Output files are written to a temporary sibling and renamed
into place only once everything succeeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .model import ClassModel, Diagnostic, ROOT_PATH
from .textio import (
    ParseError,
    emit_ddl,
    parse_class_model,
    parse_rdbms_model,
    print_class_model,
    print_rdbms_model,
    print_traces,
)
from .transform import TransformError, detect_cycles, transform
from .validate import has_errors, validate_class_model

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_USAGE = 2


class _Failed(Exception):
    def __init__(self, status: int):
        self.status = status


def format_diagnostic(file: str, diag: Diagnostic, model: Optional[ClassModel] = None) -> str:
    span = diag.span
    if span is None and model is not None:
        span = model.source_spans.get(diag.path)
    if span is not None:
        where = f"{file}:{span.line}:{span.column}"
        if diag.path != ROOT_PATH:
            return f"{where}: {diag.severity} {diag.code}: {diag.path}: {diag.message}"
        return f"{where}: {diag.severity} {diag.code}: {diag.message}"
    return f"{file}: {diag.severity} {diag.code}: {diag.path}: {diag.message}"


def _report(file: str, diags: Sequence[Diagnostic], err: TextIO, model: Optional[ClassModel] = None) -> None:
    for d in diags:
        print(format_diagnostic(file, d, model), file=err)


def _read(path: str, err: TextIO) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        print(f"{path}: error: cannot read input: {exc.strerror or exc}", file=err)
        raise _Failed(EXIT_USAGE) from None


def _load_class_model(path: str, err: TextIO) -> ClassModel:
    data = _read(path, err)
    try:
        return parse_class_model(data, path)
    except ParseError as exc:
        _report(path, exc.diagnostics, err)
        raise _Failed(EXIT_ERRORS) from None


def write_atomic(outputs: Sequence[tuple[str, str]]) -> None:
    """Write every (path, text) pair, renaming into place only after all temps exist.

    Symlinks are followed so the file they point to is replaced.  Existing
    targets that are not regular files (devices, pipes) cannot be renamed
    over and are written directly, last.
    """
    staged: list[tuple[str, Path]] = []
    direct: list[tuple[Path, str]] = []
    try:
        for path, text in outputs:
            target = Path(os.path.realpath(path))
            if target.exists() and not target.is_file():
                direct.append((target, text))
                continue
            fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
            staged.append((tmp, target))
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        for tmp, target in staged:
            os.replace(tmp, target)
        for target, text in direct:
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def cmd_validate(args, out: TextIO, err: TextIO) -> int:
    model = _load_class_model(args.input, err)
    diags = validate_class_model(model)
    _report(args.input, diags, err, model)
    return EXIT_ERRORS if has_errors(diags) else EXIT_OK


def cmd_transform(args, out: TextIO, err: TextIO) -> int:
    model = _load_class_model(args.input, err)
    diags = validate_class_model(model)
    if not has_errors(diags):
        diags = detect_cycles(model)
    if diags:
        _report(args.input, diags, err, model)
        return EXIT_ERRORS
    try:
        result = transform(model)
    except TransformError as exc:
        _report(args.input, exc.diagnostics, err, model)
        return EXIT_ERRORS
    if not result.model.table_ids:
        _report(args.input, [Diagnostic.error("NO_TABLES", ROOT_PATH, "no persistent class, nothing to transform")], err)
        return EXIT_ERRORS

    text = emit_ddl(result.model) if args.ddl else print_rdbms_model(result.model)
    outputs = []
    if args.out:
        outputs.append((args.out, text))
    if args.trace:
        outputs.append((args.trace, print_traces(result.traces)))
    try:
        write_atomic(outputs)
    except OSError as exc:
        print(f"{exc.filename or args.out}: error: cannot write output: {exc.strerror or exc}", file=err)
        return EXIT_USAGE
    if not args.out:
        out.write(text)
    return EXIT_OK


def cmd_print(args, out: TextIO, err: TextIO) -> int:
    data = _read(args.input, err)
    try:
        if args.kind == "rdbms":
            text = print_rdbms_model(parse_rdbms_model(data, args.input))
        else:
            text = print_class_model(parse_class_model(data, args.input))
    except ParseError as exc:
        _report(args.input, exc.diagnostics, err)
        return EXIT_ERRORS
    out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtx", description="Class model to RDBMS model transformer.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a class model")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transform", help="transform a class model into an RDBMS model")
    p.add_argument("input")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--trace", help="write trace links to this file")
    p.add_argument("--ddl", action="store_true", help="emit SQL DDL instead of the model syntax")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("print", help="print a model in canonical form")
    p.add_argument("input")
    p.add_argument("--kind", choices=("class", "rdbms"), default="class")
    p.set_defaults(func=cmd_print)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out, err)
    except _Failed as exc:
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
