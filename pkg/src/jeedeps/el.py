"""Expression Language reference extraction.

Only bean references are pulled out: an identifier root followed by
property accesses and method calls. Operators, literals and function calls
between them are skipped; nothing is evaluated.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

from .model import Diagnostic, DiagnosticCode, SourceLocation, warning

RESERVED = frozenset({"and", "or", "not", "empty", "null", "true", "false", "eq", "ne", "lt", "gt",
                      "le", "ge", "div", "mod", "instanceof"})
IMPLICIT_OBJECTS = frozenset({"param", "paramValues", "header", "headerValues", "sessionScope",
                              "requestScope", "pageScope", "applicationScope", "cookie", "initParam",
                              "pageContext"})


class Delimiter(str, Enum):
    Dollar = "$"
    Hash = "#"


@dataclass(frozen=True)
class Property:
    name: str

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class MethodCall:
    """A call segment; ``args`` holds literal texts, None for a non-literal argument."""

    name: str
    args: Tuple[Optional[str], ...] = ()

    def render(self) -> str:
        return f"{self.name}({', '.join(_render_arg(a) for a in self.args)})"


def _render_arg(arg: Optional[str]) -> str:
    if arg is None:
        return "?"
    return "'" + arg.replace("\\", "\\\\").replace("'", "\\'") + "'"


Segment = Union[Property, MethodCall]


@dataclass(frozen=True)
class ElReferencePath:
    base: str
    segments: Tuple[Segment, ...] = ()
    implicit: bool = False

    @property
    def member(self) -> Optional[str]:
        if not self.segments:
            return None
        return ".".join(s.render() for s in self.segments)


@dataclass(frozen=True)
class ElExpression:
    raw: str
    delimiter: Delimiter
    references: Tuple[ElReferencePath, ...] = ()


# -- tokens ----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<string>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<op>==|!=|<=|>=|&&|\|\||->|\+=|[-+*/%<>!?:.,()\[\]{};=])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int

    @property
    def value(self) -> str:
        if self.kind == "string":
            return re.sub(r"\\(.)", r"\1", self.text[1:-1], flags=re.DOTALL)
        return self.text


class MalformedEl(ValueError):
    pass


def _tokens(body: str) -> List[_Tok]:
    toks: List[_Tok] = []
    i = 0
    while i < len(body):
        m = _TOKEN.match(body, i)
        if m is None:
            if body[i] in "'\"":
                raise MalformedEl("unterminated string literal")
            raise MalformedEl(f"unexpected character {body[i]!r}")
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(0), i))
        i = m.end()
    depth = 0
    for t in toks:
        if t.kind == "op" and t.text in "([{":
            depth += 1
        elif t.kind == "op" and t.text in ")]}":
            depth -= 1
            if depth < 0:
                raise MalformedEl("unbalanced brackets")
    if depth:
        raise MalformedEl("unbalanced brackets")
    return toks


# -- extraction ------------------------------------------------------------

class _Extractor:
    def __init__(self, toks: List[_Tok]) -> None:
        self.toks = toks
        self.refs: List[Tuple[int, ElReferencePath]] = []

    def at(self, i: int, kind: str, text: Optional[str] = None) -> bool:
        if i >= len(self.toks):
            return False
        t = self.toks[i]
        return t.kind == kind and (text is None or t.text == text)

    def run(self, start: int, stop: int) -> None:
        i = start
        while i < stop:
            t = self.toks[i]
            if t.kind != "ident":
                i += 1
                continue
            prev_dot = i > start and self.at(i - 1, "op", ".")
            if prev_dot or t.text in RESERVED:
                i += 1
                continue
            # prefix:function( ... )
            if self.at(i + 1, "op", ":") and self.at(i + 2, "ident") and self.at(i + 3, "op", "("):
                i += 3
                continue
            if self.at(i + 1, "op", "(") or self.at(i + 1, "op", "->"):
                i += 1
                continue
            i = self.chain(i, stop)

    def chain(self, i: int, stop: int) -> int:
        base = self.toks[i]
        segments: List[Segment] = []
        i += 1
        while i < stop:
            if self.at(i, "op", ".") and self.at(i + 1, "ident"):
                name = self.toks[i + 1].text
                if self.at(i + 2, "op", "("):
                    close = self.close_of(i + 2)
                    segments.append(MethodCall(name, self.arguments(i + 3, close)))
                    i = close + 1
                else:
                    segments.append(Property(name))
                    i += 2
                continue
            if self.at(i, "op", "["):
                close = self.close_of(i)
                inner = self.toks[i + 1:close]
                if len(inner) == 1 and inner[0].kind in ("string", "number"):
                    segments.append(Property(inner[0].value))
                    i = close + 1
                    continue
                self.run(i + 1, close)
                i = close + 1
                break
            break
        self.refs.append((base.pos, ElReferencePath(base.text, tuple(segments), base.text in IMPLICIT_OBJECTS)))
        return i

    def close_of(self, open_index: int) -> int:
        depth = 0
        for j in range(open_index, len(self.toks)):
            t = self.toks[j]
            if t.kind == "op" and t.text in "([{":
                depth += 1
            elif t.kind == "op" and t.text in ")]}":
                depth -= 1
                if depth == 0:
                    return j
        return len(self.toks)

    def arguments(self, start: int, close: int) -> Tuple[Optional[str], ...]:
        if start >= close:
            return ()
        args: List[Optional[str]] = []
        part_start = start
        depth = 0
        for j in range(start, close + 1):
            t = self.toks[j] if j < close else None
            if t is not None and t.kind == "op" and t.text in "([{":
                depth += 1
            elif t is not None and t.kind == "op" and t.text in ")]}":
                depth -= 1
            if j == close or (depth == 0 and t.kind == "op" and t.text == ","):
                part = self.toks[part_start:j]
                if len(part) == 1 and part[0].kind in ("string", "number"):
                    args.append(part[0].value)
                else:
                    args.append(None)
                    self.run(part_start, j)
                part_start = j + 1
        return tuple(args)


def find_el_end(text: str, start: int) -> int:
    """Index just past the '}' matching the '{' at ``start``; -1 if unterminated.

    Quotes and nested braces inside the expression are honoured.
    """
    depth = 0
    i = start
    quote = None
    while i < len(text):
        ch = text[i]
        if quote:
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return -1


def parse_el(raw: str, location: Optional[SourceLocation] = None) -> Tuple[ElExpression, List[Diagnostic]]:
    delimiter = Delimiter.Hash if raw.startswith("#") else Delimiter.Dollar
    try:
        if not (raw.startswith("${") or raw.startswith("#{")) or not raw.endswith("}"):
            raise MalformedEl("expression must be delimited by ${...} or #{...}")
        if find_el_end(raw, 1) != len(raw):
            raise MalformedEl("unbalanced braces or quotes")
        toks = _tokens(raw[2:-1])
    except MalformedEl as exc:
        return ElExpression(raw, delimiter), [warning(DiagnosticCode.MALFORMED_EL, f"{exc}: {raw}", location)]
    ex = _Extractor(toks)
    ex.run(0, len(toks))
    refs = tuple(ref for _, ref in sorted(ex.refs, key=lambda pair: pair[0]))
    return ElExpression(raw, delimiter, refs), []
