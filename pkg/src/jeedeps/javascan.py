"""Token-level scanning of Java sources.

Recognises @WebServlet URL declarations, RequestDispatcher forward/include
calls (chained and via a local variable), @ManagedBean / @ManagedProperty,
the servlet base class and JavaBeans conventions. No parsing beyond what
those patterns need.
"""
from __future__ import annotations

import posixpath
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from .lexer import IDENT, OP, STRING, Token, tokenize
from .model import Diagnostic, DiagnosticCode, SourceLocation, warning

NON_LITERAL = "non-literal URL"
UNTRACKED_DISPATCHER = "dispatcher not obtained from a literal getRequestDispatcher call"


class ServletKind(str, Enum):
    HttpServlet = "HttpServlet"
    GenericServlet = "GenericServlet"
    NotAServlet = "NotAServlet"


class DispatchMethod(str, Enum):
    Forward = "Forward"
    Include = "Include"


class Scenario(str, Enum):
    TwoStatement = "TwoStatement"
    Chained = "Chained"


@dataclass(frozen=True)
class DispatcherCall:
    """A forward/include through a RequestDispatcher.

    ``url`` holds the unescaped string literal, or None when the argument was
    not a single literal, in which case ``dynamic_reason`` says why.
    """

    url: Optional[str]
    method: DispatchMethod
    location: SourceLocation
    scenario: Scenario
    dynamic_reason: Optional[str] = None

    @property
    def is_literal(self) -> bool:
        return self.url is not None


@dataclass(frozen=True)
class BeanTraits:
    is_serializable: bool = False
    has_no_arg_constructor: bool = True
    property_pairs: Tuple[str, ...] = ()

    @property
    def looks_like_bean(self) -> bool:
        return self.is_serializable and self.has_no_arg_constructor and bool(self.property_pairs)


@dataclass(frozen=True)
class PatternFinding:
    pattern: str
    location: SourceLocation


@dataclass(frozen=True)
class ManagedBeanFinding:
    name: str
    location: SourceLocation


@dataclass(frozen=True)
class ManagedPropertyFinding:
    field_name: str
    expression: str
    location: SourceLocation


@dataclass(frozen=True)
class JavaScanResult:
    type_name: str
    servlet_kind: ServletKind = ServletKind.NotAServlet
    web_servlet_patterns: Tuple[PatternFinding, ...] = ()
    managed_bean: Optional[ManagedBeanFinding] = None
    managed_properties: Tuple[ManagedPropertyFinding, ...] = ()
    dispatcher_calls: Tuple[DispatcherCall, ...] = ()
    bean_traits: BeanTraits = field(default_factory=BeanTraits)

    @property
    def simple_name(self) -> str:
        return self.type_name.rsplit(".", 1)[-1]


# -- helpers ---------------------------------------------------------------

def _loc(path: str, tok: Token) -> SourceLocation:
    return SourceLocation(path, tok.line, tok.column)


def _matching(tokens: Sequence[Token], start: int, open_: str, close: str) -> int:
    """Index of the token closing the bracket opened at ``start``; len(tokens) if unclosed."""
    depth = 0
    for i in range(start, len(tokens)):
        t = tokens[i]
        if t.kind == OP:
            if t.text == open_:
                depth += 1
            elif t.text == close:
                depth -= 1
                if depth == 0:
                    return i
    return len(tokens)


def _split_top(tokens: Sequence[Token], sep: str = ",") -> List[List[Token]]:
    parts: List[List[Token]] = [[]]
    depth = 0
    for t in tokens:
        if t.kind == OP and t.text in "({[":
            depth += 1
        elif t.kind == OP and t.text in ")}]":
            depth -= 1
        if depth == 0 and t.is_op(sep):
            parts.append([])
            continue
        parts[-1].append(t)
    return [p for p in parts if p]


def _depths(tokens: Sequence[Token]) -> Tuple[List[int], bool]:
    """Brace depth before each token, and whether the braces balance."""
    depths = []
    depth = 0
    balanced = True
    for t in tokens:
        depths.append(depth)
        if t.is_op("{"):
            depth += 1
        elif t.is_op("}"):
            depth -= 1
            if depth < 0:
                balanced = False
                depth = 0
    return depths, balanced and depth == 0


@dataclass
class _Annotation:
    name: str
    at: int
    end: int  # index just past the annotation
    args: List[Token]


def _read_annotation(tokens: Sequence[Token], at: int) -> Optional[_Annotation]:
    i = at + 1
    if i >= len(tokens) or tokens[i].kind != IDENT or tokens[i].text == "interface":
        return None
    name = tokens[i].text
    i += 1
    while i + 1 < len(tokens) and tokens[i].is_op(".") and tokens[i + 1].kind == IDENT:
        name = tokens[i + 1].text
        i += 2
    args: List[Token] = []
    if i < len(tokens) and tokens[i].is_op("("):
        close = _matching(tokens, i, "(", ")")
        args = list(tokens[i + 1:close])
        i = close + 1
    return _Annotation(name, at, i, args)


def _annotation_elements(args: List[Token]) -> dict:
    """Map element name ('value' for the unnamed form) to its value tokens."""
    out = {}
    for part in _split_top(args):
        if len(part) >= 2 and part[0].kind == IDENT and part[1].is_op("=") and not (
                len(part) > 2 and part[2].is_op("=")):
            out[part[0].text] = part[2:]
        else:
            out["value"] = part
    return out


def _string_elements(value: List[Token]) -> List[Token]:
    """Literal strings of an element value: "x" or {"a", "b"}; non-literal items are skipped."""
    if value and value[0].is_op("{"):
        close = _matching(value, 0, "{", "}")
        items = _split_top(value[1:close])
    else:
        items = [value]
    return [item[0] for item in items if len(item) == 1 and item[0].kind == STRING]


def _single_string(value: Optional[List[Token]]) -> Optional[Token]:
    if value and len(value) == 1 and value[0].kind == STRING:
        return value[0]
    return None


def decapitalize(name: str) -> str:
    if len(name) > 1 and name[0].isupper() and name[1].isupper():
        return name
    return name[:1].lower() + name[1:]


# -- dispatcher detection --------------------------------------------------

def _scope_keys(tokens: Sequence[Token], level: Optional[int]) -> List[int]:
    """Per token, the index of the enclosing brace at nesting ``level`` (-1 when shallower).

    With ``level`` None every token shares one scope.
    """
    if level is None:
        return [0] * len(tokens)
    keys = []
    stack: List[int] = []
    for i, t in enumerate(tokens):
        if t.is_op("}") and stack:
            stack.pop()
        keys.append(stack[level - 1] if len(stack) >= level else -1)
        if t.is_op("{"):
            stack.append(i)
    return keys


def _assignment_target(tokens: Sequence[Token], call: int) -> Optional[str]:
    """Name assigned by ``name = <receiver chain>.getRequestDispatcher(...)``."""
    i = call - 1
    while i >= 0:
        t = tokens[i]
        if t.is_op("."):
            i -= 1
            continue
        if t.is_op(")"):
            depth = 0
            while i >= 0:
                if tokens[i].is_op(")"):
                    depth += 1
                elif tokens[i].is_op("("):
                    depth -= 1
                    if depth == 0:
                        break
                i -= 1
            i -= 1
            continue
        if t.kind == IDENT and i + 1 < call and (tokens[i + 1].is_op(".") or tokens[i + 1].is_op("(")):
            i -= 1
            continue
        break
    if i >= 1 and tokens[i].is_op("=") and tokens[i - 1].kind == IDENT:
        if i + 1 < len(tokens) and tokens[i + 1].is_op("="):
            return None
        return tokens[i - 1].text
    return None


def find_dispatcher_calls(tokens: Sequence[Token], path: str, scope_level: Optional[int] = 2) -> List[DispatcherCall]:
    """Detect RequestDispatcher forward/include calls.

    Chained calls (``getRequestDispatcher("U").forward(..)``) are reported at
    the forward/include token. For the two-statement form the most recent
    preceding assignment of the local within the same method body supplies
    the URL; the assignment itself is not a finding.
    """
    scopes = _scope_keys(tokens, scope_level)
    declared = {tokens[i + 1].text for i in range(len(tokens) - 1)
                if tokens[i].is_ident("RequestDispatcher") and tokens[i + 1].kind == IDENT}
    assigned: dict = {}
    calls: List[DispatcherCall] = []
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.is_ident("getRequestDispatcher") and i + 1 < n and tokens[i + 1].is_op("("):
            if i > 0 and tokens[i - 1].is_ident() and not tokens[i - 1].is_ident("return") and not tokens[i - 1].is_ident("new"):
                continue  # a declaration, e.g. "RequestDispatcher getRequestDispatcher(String path)"
            close = _matching(tokens, i + 1, "(", ")")
            args = tokens[i + 2:close]
            if len(args) == 1 and args[0].kind == STRING:
                url, reason = args[0].value, None
            else:
                url, reason = None, NON_LITERAL
            if (close + 3 < n and tokens[close + 1].is_op(".")
                    and tokens[close + 2].text in ("forward", "include")
                    and tokens[close + 3].is_op("(")):
                meth = tokens[close + 2]
                calls.append(DispatcherCall(url, _method(meth.text), _loc(path, meth), Scenario.Chained, reason))
                continue
            name = _assignment_target(tokens, i)
            if name is not None:
                assigned[(scopes[i], name)] = (url, reason)
            continue
        if (tok.kind == IDENT and tok.text in ("forward", "include") and i >= 2 and i + 1 < n
                and tokens[i - 1].is_op(".") and tokens[i - 2].kind == IDENT and tokens[i + 1].is_op("(")
                and not (i >= 3 and tokens[i - 3].is_op("."))):
            name = tokens[i - 2].text
            key = (scopes[i], name)
            if key in assigned:
                url, reason = assigned[key]
            elif name in declared:
                url, reason = None, UNTRACKED_DISPATCHER
            else:
                continue
            calls.append(DispatcherCall(url, _method(tok.text), _loc(path, tok), Scenario.TwoStatement, reason))
    return calls


def _method(text: str) -> DispatchMethod:
    return DispatchMethod.Forward if text == "forward" else DispatchMethod.Include


# -- whole-file scan -------------------------------------------------------

@dataclass
class _TypeDecl:
    name: str
    keyword_index: int
    body_open: int
    body_close: int
    annotations: List[_Annotation]
    extends: List[str]
    implements: List[str]
    public: bool


_TYPE_KEYWORDS = ("class", "interface", "enum")
_MODIFIERS = {"public", "protected", "private", "static", "final", "abstract", "sealed", "non-sealed",
              "strictfp", "transient", "volatile", "synchronized", "native", "default"}


def _top_level_types(tokens: Sequence[Token], depths: Sequence[int]) -> List[_TypeDecl]:
    types: List[_TypeDecl] = []
    pending: List[_Annotation] = []
    public = False
    i = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if depths[i] != 0:
            i += 1
            continue
        if t.is_op("@"):
            ann = _read_annotation(tokens, i)
            if ann is not None:
                pending.append(ann)
                i = ann.end
                continue
            i += 1
            continue
        if t.is_op(";") or t.is_op("}"):
            pending, public = [], False
        elif t.is_ident("public"):
            public = True
        elif (t.kind == IDENT and t.text in _TYPE_KEYWORDS and i + 1 < n and tokens[i + 1].kind == IDENT
              and not (i > 0 and tokens[i - 1].is_op("."))):
            j = i + 2
            clauses: dict = {"extends": [], "implements": []}
            current = None
            while j < n and not tokens[j].is_op("{") and not tokens[j].is_op(";"):
                tj = tokens[j]
                if tj.is_ident("extends") or tj.is_ident("implements"):
                    current = tj.text
                elif current and tj.kind == IDENT and (j + 1 >= n or not tokens[j + 1].is_op(".")):
                    prev = tokens[j - 1]
                    if not prev.is_op("<") and not (prev.is_op(",") and _inside_generic(tokens, j)):
                        clauses[current].append(tj.text)
                j += 1
            if j < n and tokens[j].is_op("{"):
                close = _matching(tokens, j, "{", "}")
                types.append(_TypeDecl(tokens[i + 1].text, i, j, close, pending, clauses["extends"],
                                       clauses["implements"], public))
                pending, public = [], False
                i = close + 1 if close < n else n
                continue
        i += 1
    return types


def _inside_generic(tokens: Sequence[Token], j: int) -> bool:
    depth = 0
    for k in range(j - 1, -1, -1):
        t = tokens[k]
        if t.is_op(">"):
            depth += 1
        elif t.is_op("<"):
            if depth == 0:
                return True
            depth -= 1
        elif t.kind == IDENT and t.text in ("extends", "implements"):
            return False
    return False


def _package(tokens: Sequence[Token], depths: Sequence[int]) -> str:
    for i, t in enumerate(tokens):
        if depths[i] == 0 and t.is_ident("package"):
            parts = []
            for u in tokens[i + 1:]:
                if u.is_op(";"):
                    break
                if u.kind == IDENT:
                    parts.append(u.text)
            return ".".join(parts)
    return ""


def _field_name_after(tokens: Sequence[Token], start: int, stop: int) -> Optional[str]:
    i = start
    while i < stop:
        t = tokens[i]
        if t.is_op("@"):
            ann = _read_annotation(tokens, i)
            i = ann.end if ann else i + 1
            continue
        if t.is_op("(") or t.is_op("{") or t.is_op("}"):
            return None
        if t.kind == IDENT and i + 1 < stop and (tokens[i + 1].is_op(";") or tokens[i + 1].is_op("=")
                                                 or tokens[i + 1].is_op(",")):
            return t.text
        if t.is_op(";"):
            return None
        i += 1
    return None


def _members(tokens: Sequence[Token], depths: Sequence[int], decl: _TypeDecl, path: str):
    body_depth = depths[decl.body_open] + 1
    ctor_arities: List[int] = []
    getters: dict = {}
    setters: dict = {}
    properties: List[ManagedPropertyFinding] = []
    i = decl.body_open + 1
    while i < decl.body_close:
        t = tokens[i]
        if depths[i] != body_depth:
            i += 1
            continue
        if t.is_op("@"):
            ann = _read_annotation(tokens, i)
            if ann is None:
                i += 1
                continue
            if ann.name == "ManagedProperty":
                expr = _single_string(_annotation_elements(ann.args).get("value"))
                fname = _field_name_after(tokens, ann.end, decl.body_close)
                if expr is not None and fname is not None:
                    properties.append(ManagedPropertyFinding(fname, expr.value, _loc(path, t)))
            i = ann.end
            continue
        if t.kind == IDENT and i + 1 < decl.body_close and tokens[i + 1].is_op("("):
            prev = tokens[i - 1]
            close = _matching(tokens, i + 1, "(", ")")
            arity = len(_split_top(tokens[i + 2:close]))
            if t.text == decl.name and not prev.is_op(".") and not prev.is_ident("new"):
                ctor_arities.append(arity)
            elif prev.kind == IDENT and prev.text != "new" or prev.is_op(">") or prev.is_op("]"):
                _record_accessor(t.text, arity, getters, setters)
            i = close + 1
            continue
        i += 1
    pairs = sorted(set(getters) & set(setters))
    has_no_arg = not ctor_arities or 0 in ctor_arities
    return properties, has_no_arg, tuple(pairs)


def _record_accessor(name: str, arity: int, getters: dict, setters: dict) -> None:
    for prefix, bucket, want in (("get", getters, 0), ("is", getters, 0), ("set", setters, 1)):
        rest = name[len(prefix):]
        if name.startswith(prefix) and rest[:1].isupper() and arity == want:
            bucket.setdefault(decapitalize(rest), name)


def scan_java_source(content: str, path: str) -> Tuple[JavaScanResult, List[Diagnostic]]:
    tokens = tokenize(content)
    depths, balanced = _depths(tokens)
    diagnostics: List[Diagnostic] = []
    if not balanced:
        diagnostics.append(warning(DiagnosticCode.UNBALANCED_SOURCE,
                                   "unbalanced braces; results are best-effort", SourceLocation(path)))
    package = _package(tokens, depths)
    types = _top_level_types(tokens, depths)
    primary = next((t for t in types if t.public), types[0] if types else None)

    stem = posixpath.splitext(posixpath.basename(path))[0]
    simple = primary.name if primary else stem
    type_name = f"{package}.{simple}" if package else simple

    dispatcher_calls = find_dispatcher_calls(tokens, path, scope_level=2)
    if primary is None:
        return JavaScanResult(type_name, dispatcher_calls=tuple(dispatcher_calls)), diagnostics

    kind = ServletKind.NotAServlet
    if "HttpServlet" in primary.extends:
        kind = ServletKind.HttpServlet
    elif "GenericServlet" in primary.extends:
        kind = ServletKind.GenericServlet

    patterns: List[PatternFinding] = []
    managed_bean = None
    for ann in primary.annotations:
        if ann.name == "WebServlet":
            elements = _annotation_elements(ann.args)
            for key in ("value", "urlPatterns"):
                for tok in _string_elements(elements.get(key, [])):
                    patterns.append(PatternFinding(tok.value, _loc(path, tok)))
        elif ann.name == "ManagedBean" and managed_bean is None:
            named = _single_string(_annotation_elements(ann.args).get("name"))
            name = named.value if named is not None and named.value else decapitalize_first(simple)
            managed_bean = ManagedBeanFinding(name, _loc(path, tokens[ann.at]))

    properties, has_no_arg, pairs = _members(tokens, depths, primary, path)
    traits = BeanTraits(is_serializable="Serializable" in primary.implements,
                        has_no_arg_constructor=has_no_arg, property_pairs=pairs)
    result = JavaScanResult(type_name, kind, tuple(patterns), managed_bean, tuple(properties),
                            tuple(dispatcher_calls), traits)
    return result, diagnostics


def decapitalize_first(name: str) -> str:
    """Default managed-bean name: the simple type name with its first character lower-cased."""
    return name[:1].lower() + name[1:]
