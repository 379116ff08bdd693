"""Tolerant Java tokenizer.

Comments are dropped, string and char literals become single tokens carrying
their unescaped value, and anything unrecognised becomes a one-character
operator token. Never raises on malformed input: an unterminated literal or
comment simply runs to end of line / end of input.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import List

IDENT = "ident"
STRING = "string"
CHAR = "char"
NUMBER = "number"
OP = "op"

_IDENT_RE = re.compile(r"[A-Za-z_$À-￿][\w$À-￿]*")
_NUMBER_RE = re.compile(r"(?:0[xX][0-9a-fA-F_]+|0[bB][01_]+|(?:\d[\d_]*)?\.?\d[\d_]*(?:[eE][+-]?\d+)?)[lLfFdD]?")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "0": "\0", "s": " ",
            "'": "'", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: str
    offset: int
    line: int
    column: int

    def is_op(self, text: str) -> bool:
        return self.kind == OP and self.text == text

    def is_ident(self, text: str | None = None) -> bool:
        return self.kind == IDENT and (text is None or self.text == text)


class LineIndex:
    """Maps character offsets to 1-based (line, column)."""

    def __init__(self, text: str) -> None:
        self.starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def position(self, offset: int) -> tuple[int, int]:
        i = bisect.bisect_right(self.starts, offset) - 1
        return i + 1, offset - self.starts[i] + 1


def unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt == "u":
                j = i + 1
                while j < len(body) and body[j] == "u":
                    j += 1
                hexpart = body[j:j + 4]
                if len(hexpart) == 4 and all(c in "0123456789abcdefABCDEF" for c in hexpart):
                    out.append(chr(int(hexpart, 16)))
                    i = j + 4
                    continue
            if nxt in "01234567":
                m = re.match(r"[0-3]?[0-7]{1,2}", body[i + 1:])
                out.append(chr(int(m.group(0), 8)))
                i += 1 + len(m.group(0))
                continue
            out.append(_ESCAPES.get(nxt, nxt))
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    index = LineIndex(text)
    n = len(text)
    i = 0

    def emit(kind: str, start: int, end: int, value: str | None = None) -> None:
        line, col = index.position(start)
        raw = text[start:end]
        tokens.append(Token(kind, raw, raw if value is None else value, start, line, col))

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            i = n if j < 0 else j + 2
            continue
        if text.startswith('"""', i):
            j = text.find('"""', i + 3)
            end = n if j < 0 else j + 3
            body = text[i + 3:j if j >= 0 else n]
            if body.startswith("\n"):
                body = body[1:]
            emit(STRING, i, end, unescape(body))
            i = end
            continue
        if ch == '"' or ch == "'":
            j = i + 1
            while j < n and text[j] != ch and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            closed = j < n and text[j] == ch
            end = j + 1 if closed else min(j, n)
            emit(STRING if ch == '"' else CHAR, i, end, unescape(text[i + 1:min(j, n)]))
            i = end
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            emit(IDENT, i, m.end())
            i = m.end()
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            end = m.end() if m and m.end() > i else i + 1
            emit(NUMBER, i, end)
            i = end
            continue
        emit(OP, i, i + 1)
        i += 1
    return tokens
