"""Canonical text for models and traces, and SQL DDL for RDBMS models."""

from __future__ import annotations

from typing import Iterable

from ..model import ClassModel, RdbmsModel
from ..transform import TraceLink

__all__ = ["emit_ddl", "print_class_model", "print_rdbms_model", "print_traces"]

INDENT = "  "

SQL_TYPES = {"String": "VARCHAR(255)", "Int": "INTEGER"}


def _blocks(blocks: list[list[str]]) -> str:
    blocks = [b for b in blocks if b]
    if not blocks:
        return ""
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"


def print_class_model(model: ClassModel) -> str:
    blocks = [[f"primitive {p.name}" for p in model.primitives]]
    for c in model.classes:
        header = f"class {c.name}"
        if c.is_persistent:
            header += " persistent"
        if c.parent is not None:
            header += f" extends {model[c.parent].name}"
        lines = [header + " {"]
        for a in model.attributes_of(c):
            flag = "primary " if a.is_primary else ""
            lines.append(f"{INDENT}{flag}attr {a.name} : {model[a.type].name}")
        lines.append("}")
        blocks.append(lines)
    blocks.append([
        f"association {a.name} : {model[a.src].name} -> {model[a.dest].name}"
        for a in model.iter_associations()
    ])
    return _blocks(blocks)


def _names(model: RdbmsModel, ids) -> str:
    return ", ".join(model[c].name for c in ids)


def print_rdbms_model(model: RdbmsModel) -> str:
    blocks = []
    for t in model.tables:
        lines = [f"table {t.name} {{"]
        lines += [f"{INDENT}col {c.name} : {c.type}" for c in model.columns_of(t)]
        lines.append(f"{INDENT}pkey ({_names(model, t.pkey)})")
        for f in model.fkeys_of(t):
            lines.append(f"{INDENT}fkey ({_names(model, f.cols)}) references {model[f.references].name}")
        lines.append("}")
        blocks.append(lines)
    return _blocks(blocks)


def print_traces(traces: Iterable[TraceLink]) -> str:
    ordered = sorted(set(traces), key=lambda t: (t.target_path, t.rule, t.source_path))
    return "".join(f"{t.rule}\t{t.source_path}\t{t.target_path}\n" for t in ordered)


def sql_type(primitive: str) -> str:
    return SQL_TYPES.get(primitive, primitive.upper())


def emit_ddl(model: RdbmsModel) -> str:
    statements = []
    for t in model.tables:
        items = [f"{INDENT}{c.name} {sql_type(c.type)}" for c in model.columns_of(t)]
        items.append(f"{INDENT}PRIMARY KEY ({_names(model, t.pkey)})")
        for f in model.fkeys_of(t):
            items.append(f"{INDENT}FOREIGN KEY ({_names(model, f.cols)}) REFERENCES {model[f.references].name}")
        statements.append(f"CREATE TABLE {t.name} (\n" + ",\n".join(items) + "\n);")
    return "\n\n".join(statements) + "\n" if statements else ""
