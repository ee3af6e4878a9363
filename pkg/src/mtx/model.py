"""Class and RDBMS meta-models as id-indexed object graphs.

Both model kinds keep every element in a private arena and hand out
:class:`ElementId` handles.  Element objects refer to each other only by id,
so a model can be printed, compared and validated without chasing Python
object identity.  Models are built through the ``add_*`` methods and are meant
to be treated as read-only afterwards.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "Association",
    "Attribute",
    "Class",
    "ClassModel",
    "Column",
    "DIAGNOSTIC_CODES",
    "Diagnostic",
    "ElementId",
    "FKey",
    "ModelError",
    "PrimitiveDataType",
    "RdbmsModel",
    "SourceSpan",
    "Table",
]

# Closed set of diagnostic codes used anywhere in the toolkit.
DIAGNOSTIC_CODES = {
    # construction
    "DUP_ATTR": "attribute name already used in the owning class",
    "DUP_NAME": "name already taken where names must be unique",
    "BAD_REF": "reference does not resolve to an element of the right kind",
    # class model validation
    "NO_PRIMARY": "class has no primary attribute, local or inherited",
    "EMPTY_ATTRS": "class has no attributes, local or inherited",
    "CYCLIC_INHERITANCE": "class is its own ancestor",
    # RDBMS model validation
    "EMPTY_TABLE": "table has no columns, or model has no tables",
    "NO_PKEY": "table has an empty primary key",
    "PKEY_FOREIGN_COL": "primary key names a column of another table",
    "FK_BAD_TARGET": "foreign key does not reference a table of this model",
    "FK_BAD_COL": "foreign key column list is empty or names a foreign column",
    # transformation
    "FLATTEN_CYCLE": "attribute flattening would recurse forever",
    "DUP_COLUMN": "two derived columns of one table share a name",
    "FK_TO_NONPERSISTENT_ROOT": "foreign key target hierarchy has no table",
    "NO_TABLES": "transformation produced no tables",
    # text input
    "PARSE_ERROR": "syntax error",
    "UNRESOLVED_NAME": "name does not refer to a declared element",
}

ROOT_PATH = "model"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    path: str
    message: str
    span: Optional[SourceSpan] = None

    def __post_init__(self) -> None:
        if self.code not in DIAGNOSTIC_CODES:
            raise ValueError(f"unknown diagnostic code {self.code!r}")
        if self.severity not in ("error", "warning"):
            raise ValueError(f"unknown severity {self.severity!r}")

    @classmethod
    def error(cls, code: str, path: str, message: str, span: Optional[SourceSpan] = None) -> "Diagnostic":
        return cls("error", code, path, message, span)

    def __str__(self) -> str:
        where = str(self.span) if self.span else self.path
        return f"{where}: {self.severity} {self.code}: {self.message}"


class ModelError(Exception):
    """Raised by builders and lookups; carries the offending diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic

    @property
    def code(self) -> str:
        return self.diagnostic.code


@dataclass(frozen=True)
class ElementId:
    """Opaque handle for one element of one model."""

    model: str
    index: int

    def __repr__(self) -> str:
        return f"ElementId(#{self.index})"


# -- class model elements -------------------------------------------------


@dataclass(eq=False)
class PrimitiveDataType:
    id: ElementId
    name: str


@dataclass(eq=False)
class Class:
    id: ElementId
    name: str
    is_persistent: bool
    parent: Optional[ElementId]
    decl_index: int
    attributes: list[ElementId] = field(default_factory=list)


@dataclass(eq=False)
class Attribute:
    id: ElementId
    owner: ElementId
    name: str
    is_primary: bool
    type: ElementId
    decl_index: int


@dataclass(eq=False)
class Association:
    id: ElementId
    name: str
    src: ElementId
    dest: ElementId
    decl_index: int


Classifier = Union[PrimitiveDataType, Class]
ClassRef = Union[ElementId, Class]


class _Arena:
    """Shared arena bookkeeping for both model kinds."""

    def __init__(self) -> None:
        self.uid = uuid.uuid4().hex
        self._elements: list = []
        # element path -> where a reader found it; empty for built models
        self.source_spans: dict[str, SourceSpan] = {}

    def _new_id(self) -> ElementId:
        return ElementId(self.uid, len(self._elements))

    def _store(self, element):
        self._elements.append(element)
        return element.id

    def owns(self, eid: object) -> bool:
        return (
            isinstance(eid, ElementId)
            and eid.model == self.uid
            and 0 <= eid.index < len(self._elements)
        )

    def __getitem__(self, eid: ElementId):
        if not self.owns(eid):
            raise ModelError(
                Diagnostic.error("BAD_REF", ROOT_PATH, f"{eid!r} does not belong to this model")
            )
        return self._elements[eid.index]

    def _get(self, eid: ElementId, kind: type, what: str):
        element = self[eid]
        if not isinstance(element, kind):
            raise ModelError(
                Diagnostic.error("BAD_REF", ROOT_PATH, f"{eid!r} is not a {what}")
            )
        return element


class ClassModel(_Arena):
    """Source model: primitive data types, classes and directed associations."""

    def __init__(self) -> None:
        super().__init__()
        self.classifiers: list[ElementId] = []
        self.associations: list[ElementId] = []
        self._names: dict[str, ElementId] = {}

    # -- building

    def _check_free_name(self, name: str) -> None:
        if name in self._names:
            raise ModelError(
                Diagnostic.error("DUP_NAME", ROOT_PATH, f"classifier name {name!r} is already declared")
            )

    def add_primitive(self, name: str) -> ElementId:
        self._check_free_name(name)
        eid = self._store(PrimitiveDataType(self._new_id(), name))
        self.classifiers.append(eid)
        self._names[name] = eid
        return eid

    def add_class(self, name: str, is_persistent: bool = False, parent: Optional[ElementId] = None) -> ElementId:
        self._check_free_name(name)
        if parent is not None:
            self[parent]
        eid = self._store(Class(self._new_id(), name, is_persistent, parent, len(self.class_ids())))
        self.classifiers.append(eid)
        self._names[name] = eid
        return eid

    def set_parent(self, cls: ClassRef, parent: Optional[ElementId]) -> None:
        """Late-bind a parent; lets readers resolve forward references.

        Cycles are not rejected here, :func:`validate_class_model` reports them.
        """
        c = self.get_class(cls)
        if parent is not None:
            self[parent]
        c.parent = parent

    def add_attribute(self, cls: ClassRef, name: str, is_primary: bool, type: ElementId) -> ElementId:
        owner = self.get_class(cls)
        self[type]
        for aid in owner.attributes:
            if self[aid].name == name:
                raise ModelError(
                    Diagnostic.error(
                        "DUP_ATTR",
                        f"class {owner.name} / attr {name}",
                        f"class {owner.name} already has an attribute {name!r}",
                    )
                )
        eid = self._store(Attribute(self._new_id(), owner.id, name, is_primary, type, len(owner.attributes)))
        owner.attributes.append(eid)
        return eid

    def add_association(self, name: str, src: ElementId, dest: ElementId) -> ElementId:
        self[src]
        self[dest]
        eid = self._store(Association(self._new_id(), name, src, dest, len(self.associations)))
        self.associations.append(eid)
        return eid

    # -- lookups

    def get_class(self, cls: ClassRef) -> Class:
        if isinstance(cls, Class):
            cls = cls.id
        return self._get(cls, Class, "class")

    def class_ids(self) -> list[ElementId]:
        return [eid for eid in self.classifiers if isinstance(self[eid], Class)]

    @property
    def classes(self) -> list[Class]:
        return [self[eid] for eid in self.class_ids()]

    @property
    def primitives(self) -> list[PrimitiveDataType]:
        return [self[eid] for eid in self.classifiers if isinstance(self[eid], PrimitiveDataType)]

    def iter_associations(self) -> Iterator[Association]:
        return (self[eid] for eid in self.associations)

    def lookup(self, name: str) -> ElementId:
        try:
            return self._names[name]
        except KeyError:
            raise ModelError(
                Diagnostic.error("BAD_REF", ROOT_PATH, f"no classifier named {name!r}")
            ) from None

    def is_class(self, eid: ElementId) -> bool:
        return self.owns(eid) and isinstance(self[eid], Class)

    def is_persistent_class(self, eid: ElementId) -> bool:
        return self.is_class(eid) and self[eid].is_persistent

    def attributes_of(self, cls: ClassRef) -> list[Attribute]:
        return [self[a] for a in self.get_class(cls).attributes]

    # -- inheritance queries

    def ancestors(self, cls: ClassRef) -> list[Class]:
        """Chain from ``cls`` up to its hierarchy root, ``cls`` first."""
        c = self.get_class(cls)
        chain = [c]
        seen = {c.id}
        while c.parent is not None:
            c = self.get_class(c.parent)
            if c.id in seen:
                raise ModelError(
                    Diagnostic.error(
                        "CYCLIC_INHERITANCE",
                        f"class {c.name}",
                        f"inheritance cycle through class {c.name}",
                    )
                )
            seen.add(c.id)
            chain.append(c)
        return chain

    def hierarchy_root(self, cls: ClassRef) -> Class:
        return self.ancestors(cls)[-1]

    def all_attributes(self, cls: ClassRef) -> list[Attribute]:
        """Inherited-then-local attributes, subclass definitions overriding in place."""
        merged: dict[str, Attribute] = {}
        for c in reversed(self.ancestors(cls)):
            for aid in c.attributes:
                attr = self[aid]
                # dict assignment keeps the original slot for an existing key
                merged[attr.name] = attr
        return list(merged.values())

    def children(self, cls: ClassRef) -> list[Class]:
        pid = self.get_class(cls).id
        return [c for c in self.classes if c.parent == pid]

    def hierarchy_members(self, root: ClassRef) -> list[Class]:
        """Pre-order walk of the subclass tree below ``root``, ``root`` first."""
        by_parent: dict[ElementId, list[Class]] = {}
        for c in self.classes:
            if c.parent is not None:
                by_parent.setdefault(c.parent, []).append(c)
        out: list[Class] = []
        seen: set[ElementId] = set()
        stack = [self.get_class(root)]
        while stack:
            c = stack.pop()
            if c.id in seen:
                raise ModelError(
                    Diagnostic.error("CYCLIC_INHERITANCE", f"class {c.name}", f"inheritance cycle through class {c.name}")
                )
            seen.add(c.id)
            out.append(c)
            stack.extend(reversed(by_parent.get(c.id, [])))
        return out

    def associations_from(self, cls: ClassRef) -> list[Association]:
        """Associations whose src is ``cls`` or one of its ancestors, in declaration order."""
        lineage = {c.id for c in self.ancestors(cls)}
        return [a for a in self.iter_associations() if a.src in lineage]

    # -- element paths

    def path(self, eid: ElementId) -> str:
        e = self[eid]
        if isinstance(e, PrimitiveDataType):
            return f"primitive {e.name}"
        if isinstance(e, Class):
            return f"class {e.name}"
        if isinstance(e, Attribute):
            return f"class {self[e.owner].name} / attr {e.name}"
        return f"association {e.name}"

    def resolve_path(self, path: str) -> Optional[ElementId]:
        """Inverse of :meth:`path`; ``None`` when nothing matches."""
        if path == ROOT_PATH:
            return None
        head, _, rest = path.partition(" / ")
        kind, _, name = head.partition(" ")
        if kind == "association" and not rest:
            for a in self.iter_associations():
                if a.name == name:
                    return a.id
            return None
        eid = self._names.get(name)
        if eid is None:
            return None
        element = self[eid]
        if kind == "primitive" and not rest:
            return eid if isinstance(element, PrimitiveDataType) else None
        if kind != "class" or not isinstance(element, Class):
            return None
        if not rest:
            return eid
        sub, _, attr_name = rest.partition(" ")
        if sub != "attr":
            return None
        for aid in element.attributes:
            if self[aid].name == attr_name:
                return aid
        return None

    def snapshot(self) -> tuple:
        """Structural, id-free view used for equality checks."""

        def name_of(eid: Optional[ElementId]) -> Optional[str]:
            return None if eid is None else self[eid].name

        return (
            tuple(p.name for p in self.primitives),
            tuple(
                (
                    c.name,
                    c.is_persistent,
                    name_of(c.parent),
                    tuple((a.name, a.is_primary, name_of(a.type)) for a in self.attributes_of(c)),
                )
                for c in self.classes
            ),
            tuple((a.name, name_of(a.src), name_of(a.dest)) for a in self.iter_associations()),
        )


# -- RDBMS model elements ---------------------------------------------------


@dataclass(eq=False)
class Column:
    id: ElementId
    table: ElementId
    name: str
    type: str


@dataclass(eq=False)
class FKey:
    id: ElementId
    table: ElementId
    references: ElementId
    cols: list[ElementId]


@dataclass(eq=False)
class Table:
    id: ElementId
    name: str
    columns: list[ElementId] = field(default_factory=list)
    pkey: list[ElementId] = field(default_factory=list)
    fkeys: list[ElementId] = field(default_factory=list)


class RdbmsModel(_Arena):
    """Target model: tables with columns, a primary key and foreign keys.

    Builders only insist that references stay inside this model; structural
    rules (non-empty keys, containment, unique names) are checked by
    :func:`mtx.validate.validate_rdbms_model` so that it can see bad models.
    """

    def __init__(self) -> None:
        super().__init__()
        self.table_ids: list[ElementId] = []

    def add_table(self, name: str) -> ElementId:
        eid = self._store(Table(self._new_id(), name))
        self.table_ids.append(eid)
        return eid

    def add_column(self, table: ElementId, name: str, type: str) -> ElementId:
        t = self._get(table, Table, "table")
        eid = self._store(Column(self._new_id(), t.id, name, type))
        t.columns.append(eid)
        return eid

    def set_pkey(self, table: ElementId, cols: Iterable[ElementId]) -> None:
        t = self._get(table, Table, "table")
        cols = list(cols)
        for c in cols:
            self._get(c, Column, "column")
        t.pkey = cols

    def add_fkey(self, table: ElementId, references: ElementId, cols: Iterable[ElementId]) -> ElementId:
        t = self._get(table, Table, "table")
        self[references]
        cols = list(cols)
        for c in cols:
            self._get(c, Column, "column")
        eid = self._store(FKey(self._new_id(), t.id, references, cols))
        t.fkeys.append(eid)
        return eid

    @property
    def tables(self) -> list[Table]:
        return [self[t] for t in self.table_ids]

    def table_named(self, name: str) -> Optional[Table]:
        for t in self.tables:
            if t.name == name:
                return t
        return None

    def columns_of(self, table: Union[ElementId, Table]) -> list[Column]:
        t = table if isinstance(table, Table) else self._get(table, Table, "table")
        return [self[c] for c in t.columns]

    def fkeys_of(self, table: Union[ElementId, Table]) -> list[FKey]:
        t = table if isinstance(table, Table) else self._get(table, Table, "table")
        return [self[f] for f in t.fkeys]

    def path(self, eid: ElementId) -> str:
        e = self[eid]
        if isinstance(e, Table):
            return f"table {e.name}"
        t = self[e.table]
        if isinstance(e, Column):
            return f"table {t.name} / col {e.name}"
        return f"table {t.name} / fkey {t.fkeys.index(e.id) + 1}"

    def resolve_path(self, path: str) -> Optional[ElementId]:
        head, _, rest = path.partition(" / ")
        kind, _, name = head.partition(" ")
        if kind != "table":
            return None
        t = self.table_named(name)
        if t is None:
            return None
        if not rest:
            return t.id
        sub, _, key = rest.partition(" ")
        if sub == "col":
            for c in self.columns_of(t):
                if c.name == key:
                    return c.id
        elif sub == "fkey" and key.isdigit() and 1 <= int(key) <= len(t.fkeys):
            return t.fkeys[int(key) - 1]
        return None

    def snapshot(self) -> tuple:
        def col_name(c: ElementId) -> str:
            return self[c].name

        def target(f: FKey) -> str:
            ref = self[f.references]
            return ref.name if isinstance(ref, Table) else f"<{type(ref).__name__}>"

        return tuple(
            (
                t.name,
                tuple((c.name, c.type) for c in self.columns_of(t)),
                tuple(col_name(c) for c in t.pkey),
                tuple((target(f), tuple(col_name(c) for c in f.cols)) for f in self.fkeys_of(t)),
            )
            for t in self.tables
        )
