"""Naive reference flattener over the dict descriptions from ``randmodels``.

Shares no code with ``mtx``: its own inheritance walk, its own flattening by
plain structural recursion and its own printer.  ``reference_transform``
returns the canonical RDBMS text, or ``("error", CODE)`` when the model has
to be rejected.
"""

from __future__ import annotations

from collections import namedtuple

Col = namedtuple("Col", "name type primary fk")


class Rejected(Exception):
    def __init__(self, code):
        self.code = code


def _index(desc):
    return {c["name"]: c for c in desc["classes"]}


def _chain(classes, name):
    out = []
    while name is not None:
        if name in out:
            raise Rejected("CYCLIC_INHERITANCE")
        out.append(name)
        name = classes[name]["parent"]
    return out


def _all_attrs(classes, name):
    merged = []
    for cname in reversed(_chain(classes, name)):
        for attr in classes[cname]["attrs"]:
            for i, old in enumerate(merged):
                if old[0] == attr[0]:
                    merged[i] = attr
                    break
            else:
                merged.append(attr)
    return merged


def _members(classes, root):
    out = [root]
    for c in classes.values():
        if c["parent"] == root:
            out += _members(classes, c["name"])
    return out


class _Run:
    def __init__(self, desc):
        self.desc = desc
        self.classes = _index(desc)
        self.next_fk = 0

    def assocs_from(self, name):
        chain = _chain(self.classes, name)
        return [a for a in self.desc["assocs"] if a[1] in chain]

    def expand(self, names, type_, primary, stack=()):
        if type_ in self.desc["primitives"]:
            return [Col("_".join(names), type_, primary, None)]
        if type_ in stack:
            raise Rejected("FLATTEN_CYCLE")
        stack = stack + (type_,)
        cls = self.classes[type_]
        if cls["persistent"]:
            self.next_fk += 1
            fk = (self.next_fk, _chain(self.classes, type_)[-1])
            cols = []
            for name, is_primary, t in _all_attrs(self.classes, type_):
                if is_primary:
                    for col in self.expand(names + [name], t, primary, stack):
                        cols.append(col._replace(fk=fk))
            return cols
        cols = []
        for name, is_primary, t in _all_attrs(self.classes, type_):
            cols += self.expand(names + [name], t, primary and is_primary, stack)
        for name, _, dest in self.assocs_from(type_):
            cols += self.expand(names + [name], dest, False, stack)
        return cols


def check(desc):
    """Raise ``Rejected`` if the description is not a valid, terminating model."""
    classes = _index(desc)
    for name in classes:
        attrs = _all_attrs(classes, name)
        if not attrs:
            raise Rejected("EMPTY_ATTRS")
        if not any(primary for _, primary, _ in attrs):
            raise Rejected("NO_PRIMARY")
    run = _Run(desc)
    for name in classes:
        run.expand(["x"], name, False)


def tables(desc):
    """List of (name, cols, pkey, fkeys) in output order."""
    check(desc)
    classes = _index(desc)
    run = _Run(desc)
    result = []
    for c in desc["classes"]:
        if c["parent"] is not None:
            continue
        members = _members(classes, c["name"])
        if not any(classes[m]["persistent"] for m in members):
            continue
        plan = []
        for m in members:
            for attr in classes[m]["attrs"]:
                for i, old in enumerate(plan):
                    if old[0] == attr[0]:
                        plan[i] = attr
                        break
                else:
                    plan.append(attr)
        cols = []
        for name, primary, t in plan:
            cols += run.expand([name], t, primary)
        for name, src, dest in desc["assocs"]:
            if src in members:
                cols += run.expand([name], dest, False)
        seen = [col.name for col in cols]
        if len(set(seen)) != len(seen):
            raise Rejected("DUP_COLUMN")
        pkey = [col.name for col in cols if col.primary]
        if not pkey:
            raise Rejected("NO_PKEY")
        fkeys = {}
        for col in cols:
            if col.fk is not None:
                fkeys.setdefault(col.fk, []).append(col.name)
        result.append((c["name"], cols, pkey, [(fk[1], names) for fk, names in fkeys.items()]))
    return result


def reference_transform(desc):
    try:
        found = tables(desc)
    except Rejected as exc:
        return ("error", exc.code)
    chunks = []
    for name, cols, pkey, fkeys in found:
        text = "table " + name + " {\n"
        for col in cols:
            text += "  col " + col.name + " : " + col.type + "\n"
        text += "  pkey (" + ", ".join(pkey) + ")\n"
        for target, names in fkeys:
            text += "  fkey (" + ", ".join(names) + ") references " + target + "\n"
        chunks.append(text + "}\n")
    return "\n".join(chunks)


def nesting_depth(desc):
    """Largest number of class hops behind any derived column."""
    depth = 0
    for _, cols, _, _ in tables(desc):
        for col in cols:
            depth = max(depth, col.name.count("_"))
    return depth
