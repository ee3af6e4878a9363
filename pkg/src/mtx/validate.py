"""Well-formedness checks for class and RDBMS models.

Both validators collect every finding instead of stopping at the first one.
"""

from __future__ import annotations

from .model import (
    ROOT_PATH,
    Class,
    ClassModel,
    Column,
    Diagnostic,
    ModelError,
    PrimitiveDataType,
    RdbmsModel,
    Table,
)

__all__ = ["validate_class_model", "validate_rdbms_model", "has_errors"]


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


def _cyclic_classes(model: ClassModel) -> list[list[Class]]:
    """Each inheritance cycle once, listed from its first-declared member."""
    cycles = []
    on_cycle: set = set()
    for start in model.classes:
        seen: list = []
        c = start
        while c is not None and c.id not in seen and c.id not in on_cycle:
            seen.append(c.id)
            c = model[c.parent] if c.parent is not None and model.is_class(c.parent) else None
        if c is None or c.id in on_cycle:
            continue
        ring = seen[seen.index(c.id):]
        on_cycle.update(ring)
        members = sorted((model[eid] for eid in ring), key=lambda k: k.decl_index)
        cycles.append(members)
    return cycles


def validate_class_model(model: ClassModel) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    seen_names: set[str] = set()
    for eid in model.classifiers:
        element = model[eid]
        if element.name in seen_names:
            diags.append(Diagnostic.error("DUP_NAME", model.path(eid), f"classifier name {element.name!r} is declared twice"))
        seen_names.add(element.name)

    for c in model.classes:
        path = f"class {c.name}"
        if c.parent is not None and not model.is_class(c.parent):
            diags.append(Diagnostic.error("BAD_REF", path, f"parent of class {c.name} is not a class"))
        names: set[str] = set()
        for a in model.attributes_of(c):
            if a.name in names:
                diags.append(Diagnostic.error("DUP_NAME", model.path(a.id), f"attribute {a.name!r} declared twice in class {c.name}"))
            names.add(a.name)
            if not model.owns(a.type) or not isinstance(model[a.type], (Class, PrimitiveDataType)):
                diags.append(Diagnostic.error("BAD_REF", model.path(a.id), f"type of attribute {a.name!r} is not a classifier"))

    for a in model.iter_associations():
        for end, eid in (("src", a.src), ("dest", a.dest)):
            if not model.is_class(eid):
                diags.append(Diagnostic.error("BAD_REF", model.path(a.id), f"{end} of association {a.name} is not a class"))

    cycles = _cyclic_classes(model)
    for ring in cycles:
        names = " -> ".join(c.name for c in ring + ring[:1])
        diags.append(Diagnostic.error("CYCLIC_INHERITANCE", f"class {ring[0].name}", f"inheritance cycle: {names}"))

    for c in model.classes:
        try:
            attrs = model.all_attributes(c)
        except ModelError:
            # reported above as CYCLIC_INHERITANCE or BAD_REF
            continue
        path = f"class {c.name}"
        if not attrs:
            diags.append(Diagnostic.error("EMPTY_ATTRS", path, f"class {c.name} has no attributes"))
        if not any(a.is_primary for a in attrs):
            diags.append(Diagnostic.error("NO_PRIMARY", path, f"class {c.name} has no primary attribute"))
    return diags


def validate_rdbms_model(model: RdbmsModel) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    if not model.table_ids:
        diags.append(Diagnostic.error("EMPTY_TABLE", ROOT_PATH, "model has no tables"))

    table_names: set[str] = set()
    for t in model.tables:
        tpath = f"table {t.name}"
        if t.name in table_names:
            diags.append(Diagnostic.error("DUP_NAME", tpath, f"table name {t.name!r} is declared twice"))
        table_names.add(t.name)

        if not t.columns:
            diags.append(Diagnostic.error("EMPTY_TABLE", tpath, f"table {t.name} has no columns"))
        col_names: set[str] = set()
        for col in model.columns_of(t):
            if col.name in col_names:
                diags.append(Diagnostic.error("DUP_NAME", f"{tpath} / col {col.name}", f"column {col.name!r} declared twice in table {t.name}"))
            col_names.add(col.name)

        if not t.pkey:
            diags.append(Diagnostic.error("NO_PKEY", tpath, f"table {t.name} has no primary key"))
        for cid in t.pkey:
            if cid not in t.columns:
                diags.append(Diagnostic.error("PKEY_FOREIGN_COL", tpath, f"primary key of {t.name} names column {model[cid].name!r} of another table"))

        for f in model.fkeys_of(t):
            fpath = model.path(f.id)
            if not isinstance(model[f.references], Table):
                diags.append(Diagnostic.error("FK_BAD_TARGET", fpath, "foreign key does not reference a table"))
            if not f.cols:
                diags.append(Diagnostic.error("FK_BAD_COL", fpath, "foreign key has no columns"))
            for cid in f.cols:
                if cid not in t.columns or not isinstance(model[cid], Column):
                    diags.append(Diagnostic.error("FK_BAD_COL", fpath, f"foreign key column {model[cid].name!r} is not owned by table {t.name}"))
    return diags
