"""Recursive-descent readers for the class-model and RDBMS-model syntaxes.

Reading happens in two passes: the syntax pass collects declarations with
their source spans, then a resolution pass builds the model so that names
may be used before they are declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..model import ROOT_PATH, ClassModel, Diagnostic, ModelError, RdbmsModel, SourceSpan
from .lexer import Token, decode, tokenize

__all__ = ["ParseError", "parse_class_model", "parse_rdbms_model"]


class ParseError(Exception):
    """Input could not be turned into a model; ``diagnostics`` says why."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class _SyntaxError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


def _sort(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: (d.span.line, d.span.column) if d.span else (0, 0))


class _TokenStream:
    top_keywords: frozenset[str] = frozenset()

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected: str) -> _SyntaxError:
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return _SyntaxError(Diagnostic.error("PARSE_ERROR", ROOT_PATH, f"expected {expected}, found {found}", tok.span))

    def word(self, word: str) -> Token:
        if not self.at_word(word):
            raise self.fail(repr(word))
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.peek().kind != "ident":
            raise self.fail(what)
        return self.advance()

    def punct(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            raise self.fail(repr(text))
        return self.advance()

    def ident_list(self) -> list[Token]:
        self.punct("(")
        names = [self.ident("column name")]
        while self.peek().text == "," and self.peek().kind == "punct":
            self.advance()
            names.append(self.ident("column name"))
        self.punct(")")
        return names

    def recover(self, start: int) -> None:
        """Skip to the next top-level keyword, always making progress."""
        self.pos = max(self.pos, start + 1)
        self.pos = min(self.pos, len(self.tokens) - 1)
        while self.peek().kind != "eof" and not (self.peek().kind == "ident" and self.peek().text in self.top_keywords):
            self.advance()


# -- class models -----------------------------------------------------------


@dataclass
class _AttrDecl:
    name: Token
    primary: bool
    type: Token


@dataclass
class _ClassDecl:
    name: Token
    persistent: bool
    parent: Optional[Token]
    attrs: list[_AttrDecl] = field(default_factory=list)


@dataclass
class _AssocDecl:
    name: Token
    src: Token
    dest: Token


class _ClassSyntax(_TokenStream):
    top_keywords = frozenset({"primitive", "class", "association"})

    def declarations(self) -> tuple[list, list[Diagnostic]]:
        decls: list = []
        diags: list[Diagnostic] = []
        while self.peek().kind != "eof":
            start = self.pos
            try:
                if self.at_word("primitive"):
                    self.advance()
                    decls.append(("primitive", self.ident("primitive type name")))
                elif self.at_word("class"):
                    decls.append(self.class_decl())
                elif self.at_word("association"):
                    decls.append(self.association())
                else:
                    raise self.fail("'primitive', 'class' or 'association'")
            except _SyntaxError as exc:
                diags.append(exc.diagnostic)
                self.recover(start)
        return decls, diags

    def class_decl(self) -> _ClassDecl:
        self.word("class")
        decl = _ClassDecl(self.ident("class name"), False, None)
        if self.at_word("persistent"):
            self.advance()
            decl.persistent = True
        if self.at_word("extends"):
            self.advance()
            decl.parent = self.ident("parent class name")
        self.punct("{")
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            primary = False
            if self.at_word("primary"):
                self.advance()
                primary = True
            elif not self.at_word("attr"):
                raise self.fail("'attr', 'primary' or '}'")
            self.word("attr")
            name = self.ident("attribute name")
            self.punct(":")
            decl.attrs.append(_AttrDecl(name, primary, self.ident("type name")))
        self.advance()
        return decl

    def association(self) -> _AssocDecl:
        self.word("association")
        name = self.ident("association name")
        self.punct(":")
        src = self.ident("source class name")
        self.punct("->")
        return _AssocDecl(name, src, self.ident("destination class name"))


def _read(data: Union[str, bytes], file: str) -> tuple[list[Token], list[Diagnostic]]:
    text, diags = decode(data, file)
    tokens, lex_diags = tokenize(text, file)
    return tokens, diags + lex_diags


def parse_class_model(data: Union[str, bytes], file: str = "<input>") -> ClassModel:
    """Read a class model.  The result is resolved but not validated.

    Raises :class:`ParseError` with PARSE_ERROR / UNRESOLVED_NAME / DUP_NAME /
    DUP_ATTR diagnostics ordered by source position.
    """
    tokens, diags = _read(data, file)
    decls, syntax = _ClassSyntax(tokens).declarations()
    diags += syntax
    if diags:
        raise ParseError(_sort(diags))

    model = ClassModel()

    def declare(tok: Token, add, path: str):
        try:
            eid = add()
        except ModelError as exc:
            diags.append(Diagnostic.error(exc.code, path, exc.diagnostic.message, tok.span))
            return None
        model.source_spans.setdefault(path, tok.span)
        return eid

    def resolve(tok: Token):
        try:
            return model.lookup(tok.text)
        except ModelError:
            diags.append(Diagnostic.error("UNRESOLVED_NAME", ROOT_PATH, f"unknown name {tok.text!r}", tok.span))
            return None

    class_ids = {}
    for decl in decls:
        if isinstance(decl, tuple):
            tok = decl[1]
            declare(tok, lambda: model.add_primitive(tok.text), f"primitive {tok.text}")
        elif isinstance(decl, _ClassDecl):
            eid = declare(decl.name, lambda: model.add_class(decl.name.text, decl.persistent), f"class {decl.name.text}")
            if eid is not None:
                class_ids[id(decl)] = eid

    for decl in decls:
        if isinstance(decl, _ClassDecl) and id(decl) in class_ids:
            cid = class_ids[id(decl)]
            if decl.parent is not None:
                parent = resolve(decl.parent)
                if parent is not None:
                    model.set_parent(cid, parent)
            for a in decl.attrs:
                type_id = resolve(a.type)
                if type_id is not None:
                    path = f"class {decl.name.text} / attr {a.name.text}"
                    declare(a.name, lambda: model.add_attribute(cid, a.name.text, a.primary, type_id), path)
        elif isinstance(decl, _AssocDecl):
            src, dest = resolve(decl.src), resolve(decl.dest)
            if src is not None and dest is not None:
                declare(decl.name, lambda: model.add_association(decl.name.text, src, dest), f"association {decl.name.text}")

    if diags:
        raise ParseError(_sort(diags))
    return model


# -- RDBMS models -----------------------------------------------------------


@dataclass
class _TableDecl:
    name: Token
    columns: list[tuple[Token, Token]] = field(default_factory=list)
    pkey: list[Token] = field(default_factory=list)
    fkeys: list[tuple[list[Token], Token]] = field(default_factory=list)


class _RdbmsSyntax(_TokenStream):
    top_keywords = frozenset({"table"})

    def declarations(self) -> tuple[list[_TableDecl], list[Diagnostic]]:
        decls: list[_TableDecl] = []
        diags: list[Diagnostic] = []
        while self.peek().kind != "eof":
            start = self.pos
            try:
                decls.append(self.table())
            except _SyntaxError as exc:
                diags.append(exc.diagnostic)
                self.recover(start)
        return decls, diags

    def table(self) -> _TableDecl:
        self.word("table")
        decl = _TableDecl(self.ident("table name"))
        self.punct("{")
        while self.at_word("col"):
            self.advance()
            name = self.ident("column name")
            self.punct(":")
            decl.columns.append((name, self.ident("type name")))
        if not self.at_word("pkey"):
            raise self.fail("'col' or 'pkey'")
        self.advance()
        decl.pkey = self.ident_list()
        while self.at_word("fkey"):
            self.advance()
            cols = self.ident_list()
            self.word("references")
            decl.fkeys.append((cols, self.ident("table name")))
        self.punct("}")
        return decl


def parse_rdbms_model(data: Union[str, bytes], file: str = "<input>") -> RdbmsModel:
    """Read an RDBMS model; raises :class:`ParseError` like :func:`parse_class_model`."""
    tokens, diags = _read(data, file)
    decls, syntax = _RdbmsSyntax(tokens).declarations()
    diags += syntax
    if diags:
        raise ParseError(_sort(diags))

    model = RdbmsModel()
    tables = {}
    first: list[_TableDecl] = []
    for decl in decls:
        name = decl.name.text
        if name in tables:
            diags.append(Diagnostic.error("DUP_NAME", f"table {name}", f"table name {name!r} is declared twice", decl.name.span))
            continue
        tables[name] = model.add_table(name)
        model.source_spans[f"table {name}"] = decl.name.span
        first.append(decl)

    for decl in first:
        tid = tables[decl.name.text]
        tname = decl.name.text
        cols = {}
        for name, type_ in decl.columns:
            path = f"table {tname} / col {name.text}"
            if name.text in cols:
                diags.append(Diagnostic.error("DUP_NAME", path, f"column {name.text!r} declared twice in table {tname}", name.span))
                continue
            cols[name.text] = model.add_column(tid, name.text, type_.text)
            model.source_spans[path] = name.span

        def columns(names: list[Token]) -> list:
            found = []
            for tok in names:
                if tok.text in cols:
                    found.append(cols[tok.text])
                else:
                    diags.append(Diagnostic.error("UNRESOLVED_NAME", f"table {tname}", f"table {tname} has no column {tok.text!r}", tok.span))
            return found

        model.set_pkey(tid, columns(decl.pkey))
        for names, target in decl.fkeys:
            fcols = columns(names)
            if target.text not in tables:
                diags.append(Diagnostic.error("UNRESOLVED_NAME", f"table {tname}", f"unknown table {target.text!r}", target.span))
                continue
            fid = model.add_fkey(tid, tables[target.text], fcols)
            model.source_spans[model.path(fid)] = target.span

    if diags:
        raise ParseError(_sort(diags))
    return model
