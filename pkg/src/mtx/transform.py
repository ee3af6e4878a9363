"""Class model to RDBMS model transformation.

Every persistent inheritance hierarchy becomes one table named after its
root.  Attributes and associations are flattened into columns: primitive
types map to a single column, persistent classes contribute their primary
key columns under a foreign key, and non-persistent classes are inlined
column by column.  Names of inlined columns join the path of attribute and
association names with ``_``.

Trace links name the rule that produced each output element:

==== ==================================================================
R1   persistent hierarchy root -> its table
R2   attribute of an inlined non-persistent class, or an association
     whose destination is non-persistent -> column
R3   top-level primitive attribute -> column
R4   reference to a persistent class, and the primary key attributes it
     pulls in -> column / foreign key
R5   attribute typed by a non-persistent class -> column
R7   non-root hierarchy member (or a non-persistent root) -> table
==== ==================================================================
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import networkx as nx

from .model import (
    Association,
    Attribute,
    Class,
    ClassModel,
    Diagnostic,
    ElementId,
    PrimitiveDataType,
    RdbmsModel,
)
from .validate import has_errors, validate_class_model

__all__ = [
    "ColumnSpec",
    "FkGroup",
    "TraceLink",
    "TransformError",
    "TransformResult",
    "detect_cycles",
    "flatten_association",
    "flatten_attribute",
    "merged_attribute_plan",
    "transform",
]

SEPARATOR = "_"


@dataclass(frozen=True)
class FkGroup:
    id: int
    target: ElementId
    origin: Optional[str] = None


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    type: str
    is_primary: bool = False
    fk_group: Optional[FkGroup] = None
    # (rule, source path) for every element on the derivation chain, outermost first
    origins: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True, order=True)
class TraceLink:
    rule: str
    source_path: str
    target_path: str


@dataclass
class TransformResult:
    model: RdbmsModel
    traces: list[TraceLink]


class TransformError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


def _cycle_error(source: ClassModel, ring: Sequence[ElementId]) -> Diagnostic:
    names = [source[c].name for c in ring]
    return Diagnostic.error(
        "FLATTEN_CYCLE",
        f"class {names[0]}",
        "flattening cycle: " + " -> ".join(names + names[:1]),
    )


class _Flattener:
    """Recursive column derivation; group ids are local to one instance."""

    def __init__(self, source: ClassModel):
        self.source = source
        self._group_ids = itertools.count(1)
        self._stack: list[ElementId] = []

    def _rule(self, type_: Union[PrimitiveDataType, Class], via: Optional[str], is_assoc: bool) -> str:
        if isinstance(type_, PrimitiveDataType):
            return {None: "R3", "inline": "R2", "key": "R4"}[via]
        if type_.is_persistent:
            return "R4"
        return "R2" if is_assoc else "R5"

    def flatten(
        self,
        prefix: Sequence[str],
        name: str,
        type_id: ElementId,
        primary: bool,
        origin: Optional[str] = None,
        via: Optional[str] = None,
        is_assoc: bool = False,
    ) -> list[ColumnSpec]:
        src = self.source
        type_ = src[type_id]
        names = [*prefix, name]
        step = ((self._rule(type_, via, is_assoc), origin),) if origin else ()

        if isinstance(type_, PrimitiveDataType):
            return [ColumnSpec(SEPARATOR.join(names), type_.name, primary, None, step)]

        if type_.id in self._stack:
            ring = self._stack[self._stack.index(type_.id):]
            raise TransformError([_cycle_error(src, ring)])
        self._stack.append(type_.id)
        try:
            out: list[ColumnSpec] = []
            if type_.is_persistent:
                group = FkGroup(next(self._group_ids), type_.id, origin)
                for a in src.all_attributes(type_):
                    if not a.is_primary:
                        continue
                    for spec in self.flatten(names, a.name, a.type, primary, src.path(a.id), "key"):
                        # the outermost reference owns the foreign key
                        out.append(replace(spec, fk_group=group, origins=step + spec.origins))
                return out

            for a in src.all_attributes(type_):
                out.extend(self.flatten(names, a.name, a.type, primary and a.is_primary, src.path(a.id), "inline"))
            for assoc in src.associations_from(type_):
                out.extend(self.flatten(names, assoc.name, assoc.dest, False, src.path(assoc.id), "inline", True))
            return [replace(spec, origins=step + spec.origins) for spec in out]
        finally:
            self._stack.pop()


def _as_id(ref: Union[ElementId, Class, PrimitiveDataType]) -> ElementId:
    return ref if isinstance(ref, ElementId) else ref.id


def flatten_attribute(
    name_prefix: Sequence[str],
    attr_name: str,
    attr_type: Union[ElementId, Class, PrimitiveDataType],
    primary_context: bool,
    source: ClassModel,
) -> list[ColumnSpec]:
    """Columns for one attribute of type ``attr_type`` under ``name_prefix``.

    Raises :class:`TransformError` (FLATTEN_CYCLE) if the derivation recurses
    into a class it is already expanding.
    """
    return _Flattener(source).flatten(list(name_prefix), attr_name, _as_id(attr_type), primary_context)


def flatten_association(assoc: Union[ElementId, Association], source: ClassModel) -> list[ColumnSpec]:
    a = source[_as_id(assoc)]
    return _Flattener(source).flatten([], a.name, a.dest, False, source.path(a.id), is_assoc=True)


def merged_attribute_plan(root: Union[ElementId, Class], source: ClassModel) -> list[tuple[Class, Attribute]]:
    """Attribute ordering of the table for the hierarchy below ``root``.

    Members are visited in pre-order; a same-named attribute replaces the
    earlier entry in place, new names append.
    """
    plan: dict[str, tuple[Class, Attribute]] = {}
    for member in source.hierarchy_members(root):
        for a in source.attributes_of(member):
            plan[a.name] = (member, a)
    return list(plan.values())


def _dependency_graph(source: ClassModel) -> nx.DiGraph:
    # Edge C -> D when flattening C may flatten D.  A non-persistent class
    # inlines everything it has; a persistent one is only ever reached through
    # its primary key.
    graph = nx.DiGraph()
    for c in source.classes:
        graph.add_node(c.id)
    for c in source.classes:
        attrs = source.all_attributes(c)
        if c.is_persistent:
            targets = [a.type for a in attrs if a.is_primary]
        else:
            targets = [a.type for a in attrs] + [a.dest for a in source.associations_from(c)]
        for t in targets:
            if source.is_class(t):
                graph.add_edge(c.id, t)
    return graph


def detect_cycles(source: ClassModel) -> list[Diagnostic]:
    """One FLATTEN_CYCLE diagnostic per elementary cycle of flattening dependencies."""
    order = {c.id: c.decl_index for c in source.classes}
    rings = []
    for cycle in nx.simple_cycles(_dependency_graph(source)):
        start = min(range(len(cycle)), key=lambda i: order[cycle[i]])
        rings.append(cycle[start:] + cycle[:start])
    rings.sort(key=lambda ring: [order[c] for c in ring])
    return [_cycle_error(source, ring) for ring in rings]


def _persistent_roots(source: ClassModel) -> list[Class]:
    roots = [c for c in source.classes if c.parent is None]
    return [r for r in roots if any(m.is_persistent for m in source.hierarchy_members(r))]


def transform(source: ClassModel) -> TransformResult:
    """Transform a class model into an RDBMS model plus trace links.

    Raises :class:`TransformError` when the source is invalid, has a
    flattening cycle, or produces clashing or keyless tables.  A source with
    no persistent class yields an empty RDBMS model.
    """
    diags = validate_class_model(source)
    if has_errors(diags):
        raise TransformError(diags)
    diags = detect_cycles(source)
    if diags:
        raise TransformError(diags)

    flattener = _Flattener(source)
    roots = _persistent_roots(source)
    table_roots = {r.id for r in roots}

    planned: list[tuple[Class, list[Class], list[ColumnSpec]]] = []
    for root in roots:
        members = source.hierarchy_members(root)
        member_ids = {m.id for m in members}
        specs: list[ColumnSpec] = []
        for _, attr in merged_attribute_plan(root, source):
            specs.extend(flattener.flatten([], attr.name, attr.type, attr.is_primary, source.path(attr.id)))
        for assoc in source.iter_associations():
            if assoc.src in member_ids:
                specs.extend(flattener.flatten([], assoc.name, assoc.dest, False, source.path(assoc.id), is_assoc=True))

        rpath = f"class {root.name}"
        seen: set[str] = set()
        for spec in specs:
            if spec.name in seen:
                diags.append(Diagnostic.error("DUP_COLUMN", rpath, f"table {root.name} would get column {spec.name!r} twice"))
            seen.add(spec.name)
            group = spec.fk_group
            if group is not None and source.hierarchy_root(group.target).id not in table_roots:
                diags.append(Diagnostic.error(
                    "FK_TO_NONPERSISTENT_ROOT", rpath,
                    f"column {spec.name!r} references class {source[group.target].name}, whose hierarchy has no table",
                ))
        if not any(s.is_primary for s in specs):
            diags.append(Diagnostic.error("NO_PKEY", rpath, f"merged attributes of hierarchy {root.name} leave no primary key"))
        planned.append((root, members, specs))
    if diags:
        raise TransformError(diags)

    target = RdbmsModel()
    table_ids = {root.id: target.add_table(root.name) for root in roots}
    traces: dict[TraceLink, None] = {}

    for root, members, specs in planned:
        tid = table_ids[root.id]
        tpath = target.path(tid)
        traces[TraceLink("R1" if root.is_persistent else "R7", f"class {root.name}", tpath)] = None
        for m in members[1:]:
            traces[TraceLink("R7", f"class {m.name}", tpath)] = None

        groups: dict[int, tuple[FkGroup, list[ElementId]]] = {}
        pkey = []
        for spec in specs:
            cid = target.add_column(tid, spec.name, spec.type)
            for rule, path in spec.origins:
                traces[TraceLink(rule, path, target.path(cid))] = None
            if spec.is_primary:
                pkey.append(cid)
            if spec.fk_group is not None:
                groups.setdefault(spec.fk_group.id, (spec.fk_group, []))[1].append(cid)
        target.set_pkey(tid, pkey)

        for group, cols in groups.values():
            ref = table_ids[source.hierarchy_root(group.target).id]
            fid = target.add_fkey(tid, ref, cols)
            if group.origin:
                traces[TraceLink("R4", group.origin, target.path(fid))] = None

    return TransformResult(target, list(traces))
