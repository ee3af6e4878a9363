from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import Union

from ..model import Diagnostic, ROOT_PATH, SourceSpan

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*", re.ASCII)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>->|[{}:(),])
    """,
    re.VERBOSE | re.ASCII,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "punct" or "eof"
    text: str
    span: SourceSpan


class _Positions:
    def __init__(self, text: str, file: str):
        self.file = file
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, offset: int, length: int = 1) -> SourceSpan:
        line = bisect.bisect_right(self.line_starts, offset)
        return SourceSpan(self.file, line, offset - self.line_starts[line - 1] + 1, max(length, 1))


def decode(data: Union[str, bytes], file: str) -> tuple[str, list[Diagnostic]]:
    """UTF-8 decode, reporting the first undecodable byte as a parse error."""
    if isinstance(data, str):
        return data, []
    try:
        return data.decode("utf-8"), []
    except UnicodeDecodeError as exc:
        head = data[: exc.start].decode("utf-8", errors="replace")
        span = _Positions(head + " ", file).span(len(head))
        diag = Diagnostic.error("PARSE_ERROR", ROOT_PATH, "input is not valid UTF-8", span)
        return data.decode("utf-8", errors="replace"), [diag]


def tokenize(text: str, file: str) -> tuple[list[Token], list[Diagnostic]]:
    pos = _Positions(text, file)
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i, end = 0, len(text)
    while i < end:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            j = i + 1
            while j < end and _TOKEN_RE.match(text, j) is None:
                j += 1
            bad = text[i:j]
            shown = bad if len(bad) <= 10 else bad[:10] + "..."
            diags.append(Diagnostic.error("PARSE_ERROR", ROOT_PATH, f"unexpected character(s) {shown!r}", pos.span(i, j - i)))
            i = j
            continue
        kind = m.lastgroup
        if kind in ("ident", "punct"):
            tokens.append(Token(kind, m.group(), pos.span(i, m.end() - i)))
        i = m.end()
    tokens.append(Token("eof", "", pos.span(end)))
    return tokens, diags
