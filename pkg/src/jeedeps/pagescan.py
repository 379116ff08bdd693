"""Tag-level scanning of JSP, JSF (Facelets) and HTML pages.

Pages are not well-formed XML, so a tolerant lexer splits the text into
tags, directives, scriptlets and template text; a second pass interprets
them against the namespace bindings declared anywhere in the page.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .el import find_el_end
from .javascan import DispatcherCall, find_dispatcher_calls
from .lexer import LineIndex, tokenize
from .model import ArtifactKind, Diagnostic, DiagnosticCode, EdgeKind, SourceLocation, warning

JSTL_CORE_URIS = frozenset({
    "http://java.sun.com/jsp/jstl/core",
    "http://java.sun.com/jstl/core",
    "http://xmlns.jcp.org/jsp/jstl/core",
    "jakarta.tags.core",
})
JSF_HTML_URIS = frozenset({
    "http://java.sun.com/jsf/html",
    "http://xmlns.jcp.org/jsf/html",
    "jakarta.faces.html",
})
DEFAULT_PREFIXES = {"c": "jstl", "h": "jsf"}


class BindingSource(str, Enum):
    XmlNamespaceAttr = "XmlNamespaceAttr"
    TaglibDirective = "TaglibDirective"


@dataclass(frozen=True)
class NamespaceBinding:
    prefix: str
    uri: str
    source: BindingSource
    location: SourceLocation


@dataclass(frozen=True)
class RawPageRef:
    mechanism: EdgeKind
    url_or_name: str
    params: Tuple[Tuple[str, str], ...] = ()
    attributes: Tuple[Tuple[str, str], ...] = ()
    location: SourceLocation = SourceLocation("")


@dataclass(frozen=True)
class UseBeanDecl:
    id: str
    class_name: str
    scope: str
    location: SourceLocation


@dataclass(frozen=True)
class PageScanResult:
    refs: Tuple[RawPageRef, ...] = ()
    bindings: Tuple[NamespaceBinding, ...] = ()
    scriptlet_findings: Tuple[DispatcherCall, ...] = ()
    el_expressions: Tuple[Tuple[str, SourceLocation], ...] = ()
    use_beans: Tuple[UseBeanDecl, ...] = ()
    diagnostics: Tuple[Diagnostic, ...] = ()


# -- lexing ----------------------------------------------------------------

@dataclass
class Attr:
    name: str
    value: Optional[str]
    value_offset: int


@dataclass
class Tag:
    name: str
    start: int
    attrs: List[Attr]
    self_closing: bool = False
    closing: bool = False

    def get(self, name: str, fold: bool = False) -> Optional[str]:
        for a in self.attrs:
            if a.name == name or (fold and a.name.lower() == name):
                return a.value
        return None

    def attr(self, name: str, fold: bool = False) -> Optional[Attr]:
        for a in self.attrs:
            if a.name == name or (fold and a.name.lower() == name):
                return a
        return None

    @property
    def prefix(self) -> Optional[str]:
        return self.name.split(":", 1)[0] if ":" in self.name else None

    @property
    def local(self) -> str:
        return self.name.split(":", 1)[-1]


@dataclass
class Directive:
    name: str
    start: int
    attrs: List[Attr]

    def get(self, name: str) -> Optional[str]:
        for a in self.attrs:
            if a.name == name:
                return a.value
        return None


@dataclass
class Scriptlet:
    start: int
    body_start: int
    body_end: int


@dataclass
class Text:
    start: int
    end: int


_NAME = re.compile(r"[A-Za-z_][\w:.\-]*")
_ATTR_NAME = re.compile(r"[^\s=/>\"'<]+")
_UNQUOTED = re.compile(r"[^\s>]+")
_EL_OPEN = re.compile(r"[$#]\{")
_RAW_BODY_TAGS = ("jsp:scriptlet", "jsp:declaration", "jsp:expression")


class _Lexer:
    def __init__(self, text: str, report) -> None:
        self.text = text
        self.n = len(text)
        self.report = report  # (code, message, offset) -> None
        self.items: list = []

    def skip_jsp_block(self, i: int) -> int:
        """Skip a nested <% ... %> starting at i; returns index after it or -1."""
        j = self.text.find("%>", i + 2)
        return -1 if j < 0 else j + 2

    def read_attrs(self, i: int, closer: str):
        """Parse attributes from i until ``closer`` ('>' or '%>'). Returns (attrs, end, self_closing) or None."""
        text, n = self.text, self.n
        attrs: List[Attr] = []
        while True:
            while i < n and text[i].isspace():
                i += 1
            if i >= n:
                return None
            if text.startswith(closer, i):
                return attrs, i + len(closer), False
            if closer == ">" and text.startswith("/>", i):
                return attrs, i + 2, True
            if text.startswith("<%", i):
                j = self.skip_jsp_block(i)
                if j < 0:
                    return None
                i = j
                continue
            if closer == ">" and text[i] == "<":
                return None  # a new tag started: this one never closed
            m = _ATTR_NAME.match(text, i)
            if m is None:
                i += 1
                continue
            name = m.group(0)
            i = m.end()
            while i < n and text[i].isspace():
                i += 1
            if i < n and text[i] == "=":
                i += 1
                while i < n and text[i].isspace():
                    i += 1
                if i >= n:
                    return None
                if text[i] in "\"'":
                    quote = text[i]
                    j = i + 1
                    while j < n and text[j] != quote:
                        if text.startswith("<%", j):
                            k = self.skip_jsp_block(j)
                            if k < 0:
                                return None
                            j = k
                            continue
                        j += 1
                    if j >= n:
                        return None
                    attrs.append(Attr(name, text[i + 1:j], i + 1))
                    i = j + 1
                else:
                    m2 = _UNQUOTED.match(text, i)
                    value = m2.group(0) if m2 else ""
                    if closer == ">" and value.endswith("/") and text.startswith(">", i + len(value)):
                        value = value[:-1]
                    attrs.append(Attr(name, value, i))
                    i += len(value)
            else:
                attrs.append(Attr(name, None, i))

    def resume(self, start: int, what: str) -> int:
        self.report(DiagnosticCode.UNTERMINATED_CONSTRUCT, f"unterminated {what}", start)
        j = self.text.find("<", start + 1)
        return self.n if j < 0 else j

    def run(self) -> list:
        text, n = self.text, self.n
        i = 0
        text_start = 0
        while i < n:
            lt = text.find("<", i)
            if lt < 0:
                break
            i = lt
            item = None
            nxt = i
            if text.startswith("<%--", i):
                j = text.find("--%>", i + 4)
                if j < 0:
                    nxt = self.resume(i, "JSP comment")
                else:
                    nxt = j + 4
            elif text.startswith("<!--", i):
                j = text.find("-->", i + 4)
                if j < 0:
                    nxt = self.resume(i, "HTML comment")
                else:
                    nxt = j + 3
            elif text.startswith("<![CDATA[", i):
                j = text.find("]]>", i + 9)
                nxt = n if j < 0 else j + 3
            elif text.startswith("<!", i) or text.startswith("<?", i):
                j = text.find(">", i + 2)
                nxt = n if j < 0 else j + 1
            elif text.startswith("<%@", i):
                j = i + 3
                while j < n and text[j].isspace():
                    j += 1
                m = _NAME.match(text, j)
                parsed = self.read_attrs(m.end(), "%>") if m else None
                if parsed is None:
                    nxt = self.resume(i, "directive")
                else:
                    attrs, end, _ = parsed
                    item = Directive(m.group(0), i, attrs)
                    nxt = end
            elif text.startswith("<%", i):
                j = text.find("%>", i + 2)
                if j < 0:
                    nxt = self.resume(i, "scriptlet")
                else:
                    if not text.startswith("<%=", i) and not text.startswith("<%!", i):
                        item = Scriptlet(i, i + 2, j)
                    nxt = j + 2
            elif text.startswith("</", i):
                m = _NAME.match(text, i + 2)
                if m is None:
                    nxt = i + 1
                else:
                    j = text.find(">", m.end())
                    if j < 0:
                        nxt = self.resume(i, "closing tag")
                    else:
                        item = Tag(m.group(0), i, [], closing=True)
                        nxt = j + 1
            else:
                m = _NAME.match(text, i + 1)
                if m is None:
                    nxt = i + 1
                else:
                    parsed = self.read_attrs(m.end(), ">")
                    if parsed is None:
                        nxt = self.resume(i, f"<{m.group(0)}> tag")
                    else:
                        attrs, end, self_closing = parsed
                        item = Tag(m.group(0), i, attrs, self_closing)
                        nxt = end
                        if item.name in _RAW_BODY_TAGS and not self_closing:
                            close = text.find(f"</{item.name}", end)
                            if close < 0:
                                self.report(DiagnosticCode.UNTERMINATED_CONSTRUCT,
                                            f"unterminated <{item.name}>", i)
                                close = n
                            if item.name == "jsp:scriptlet":
                                self.items.append(Text(text_start, i))
                                self.items.append(Scriptlet(i, end, close))
                                text_start = close
                                i = nxt = close
                                continue
                            nxt = close
            if nxt == i and item is None:
                nxt = i + 1
            if item is not None or nxt > i + 1:
                self.items.append(Text(text_start, i))
                if item is not None:
                    self.items.append(item)
                text_start = nxt
            i = nxt
        self.items.append(Text(text_start, n))
        return [it for it in self.items if not (isinstance(it, Text) and it.start >= it.end)]


# -- interpretation --------------------------------------------------------

@dataclass
class _OpenRef:
    mechanism: EdgeKind
    url_or_name: str
    attributes: list
    start: int
    params: list = field(default_factory=list)
    emit: bool = True


@dataclass
class _Parent:
    tag_name: str
    family: str  # "jsp" or "jstl"
    ref: Optional[_OpenRef]


def _has_el(value: str) -> bool:
    return "${" in value or "#{" in value


def _pure_el(value: str) -> bool:
    v = value.strip()
    if not (v.startswith("${") or v.startswith("#{")):
        return False
    return find_el_end(v, 1) == len(v)


def _iter_el(value: str):
    """Yield (offset, raw) for every ${...} / #{...} in value; unterminated ones as (offset, None)."""
    i = 0
    while True:
        m = _EL_OPEN.search(value, i)
        if m is None:
            return
        start = m.start()
        if start > 0 and value[start - 1] == "\\":
            i = start + 2
            continue
        end = find_el_end(value, start + 1)
        if end < 0:
            yield start, None
            i = start + 2
            continue
        yield start, value[start:end]
        i = end


class _Interpreter:
    def __init__(self, text: str, path: str, kind: ArtifactKind) -> None:
        self.text = text
        self.path = path
        self.kind = kind
        self.index = LineIndex(text)
        self.diagnostics: List[Diagnostic] = []
        self.bindings: List[NamespaceBinding] = []
        self.prefixes: dict = {}
        self.refs: List[_OpenRef] = []
        self.el: List[Tuple[str, int]] = []
        self.use_beans: List[UseBeanDecl] = []
        self.parents: List[_Parent] = []
        self.warned_prefix: set = set()

    def loc(self, offset: int) -> SourceLocation:
        line, col = self.index.position(offset)
        return SourceLocation(self.path, line, col)

    def diag(self, code: DiagnosticCode, message: str, offset: int) -> None:
        self.diagnostics.append(warning(code, message, self.loc(offset)))

    # bindings
    def bind(self, prefix: str, uri: str, source: BindingSource, offset: int) -> None:
        if not prefix or not uri:
            return
        self.bindings.append(NamespaceBinding(prefix, uri, source, self.loc(offset)))
        self.prefixes.setdefault(prefix, uri)

    def collect_bindings(self, items: list) -> None:
        for it in items:
            if isinstance(it, Tag) and not it.closing:
                for a in it.attrs:
                    if a.name.startswith("xmlns:") and a.value:
                        self.bind(a.name[6:], a.value.strip(), BindingSource.XmlNamespaceAttr, it.start)
                if it.name == "jsp:directive.taglib":
                    self.bind(it.get("prefix") or "", (it.get("uri") or it.get("tagdir") or "").strip(),
                              BindingSource.TaglibDirective, it.start)
            elif isinstance(it, Directive) and it.name == "taglib":
                self.bind(it.get("prefix") or "", (it.get("uri") or it.get("tagdir") or "").strip(),
                          BindingSource.TaglibDirective, it.start)

    def family(self, tag: Tag, warn: bool) -> Optional[str]:
        prefix = tag.prefix
        if prefix is None:
            return None
        uri = self.prefixes.get(prefix)
        if uri is None:
            if prefix == "jsp":
                return "jsp"
            fam = DEFAULT_PREFIXES.get(prefix)
            if fam and warn:
                self.diag(DiagnosticCode.UNDECLARED_TAGLIB_PREFIX,
                          f"prefix '{prefix}' used without a taglib or xmlns declaration", tag.start)
            return fam
        if uri in JSTL_CORE_URIS:
            return "jstl"
        if uri in JSF_HTML_URIS:
            return "jsf"
        if prefix == "jsp" or uri == "http://java.sun.com/JSP/Page":
            return "jsp"
        return None

    def add_ref(self, mechanism: EdgeKind, value: str, attributes: list, start: int,
                parent_of: Optional[Tag] = None, family: str = "") -> _OpenRef:
        ref = _OpenRef(mechanism, value, attributes, start)
        self.refs.append(ref)
        if parent_of is not None and not parent_of.self_closing:
            self.parents.append(_Parent(parent_of.name, family, ref))
        return ref

    def open_parent_without_ref(self, tag: Tag, family: str) -> None:
        if not tag.self_closing:
            self.parents.append(_Parent(tag.name, family, None))

    def close(self, tag: Tag) -> None:
        for k in range(len(self.parents) - 1, -1, -1):
            if self.parents[k].tag_name == tag.name:
                del self.parents[k:]
                return

    def add_param(self, tag: Tag, family: str) -> None:
        for parent in reversed(self.parents):
            if parent.family == family:
                if parent.ref is not None:
                    parent.ref.params.append((tag.get("name") or "", tag.get("value") or ""))
                return

    # scanning
    def scan_attr_el(self, tag: Tag, skip: Optional[Attr] = None) -> None:
        for a in tag.attrs:
            if a.value is None or not _has_el(a.value) or a.name.startswith("xmlns"):
                continue
            for off, raw in _iter_el(a.value):
                pos = a.value_offset + off
                if raw is None:
                    self.diag(DiagnosticCode.UNTERMINATED_CONSTRUCT, "unterminated EL expression", pos)
                    continue
                self.el.append((raw, pos))
                self.refs.append(_OpenRef(EdgeKind.ElReference, raw, [("tag", tag.name), ("attribute", a.name)],
                                          pos))

    def scan_text_el(self, item: Text) -> None:
        chunk = self.text[item.start:item.end]
        if "${" not in chunk and "#{" not in chunk:
            return
        for off, raw in _iter_el(chunk):
            pos = item.start + off
            if raw is None:
                self.diag(DiagnosticCode.UNTERMINATED_CONSTRUCT, "unterminated EL expression", pos)
                continue
            self.el.append((raw, pos))
            self.refs.append(_OpenRef(EdgeKind.ElReference, raw, [("context", "text")], pos))

    def html_tag(self, tag: Tag) -> bool:
        lname = tag.name.lower()
        if lname == "form":
            action = tag.get("action", fold=True)
            if action is not None and action.strip():
                method = (tag.get("method", fold=True) or "get").strip().lower() or "get"
                self.url_ref(EdgeKind.HtmlFormAction, action, [("method", method)], tag)
            return True
        if lname == "a":
            href = tag.get("href", fold=True)
            if href is not None and href.strip() and not href.strip().startswith("#"):
                self.url_ref(EdgeKind.HrefLink, href, [], tag)
            return True
        return False

    def url_ref(self, mechanism: EdgeKind, value: str, attributes: list, tag: Tag,
                parent: bool = False, family: str = "") -> None:
        self.add_ref(mechanism, value.strip(), attributes, tag.start, tag if parent else None, family)

    def tag(self, tag: Tag) -> None:
        if tag.closing:
            self.close(tag)
            return
        if tag.prefix is None:
            self.html_tag(tag)
            if self.kind is not ArtifactKind.HtmlPage:
                self.scan_attr_el(tag)
            return
        if self.kind is ArtifactKind.HtmlPage:
            return
        local = tag.local
        fam = self.family(tag, warn=False)
        if fam == "jsp":
            self.jsp_action(tag, local)
        elif fam == "jstl":
            self.jstl_tag(tag, local)
        elif fam == "jsf":
            if local in ("commandButton", "commandLink"):
                self.family(tag, warn=True)
                self.jsf_command(tag, local)
                return
        self.scan_attr_el(tag)

    def jsp_action(self, tag: Tag, local: str) -> None:
        if local == "include":
            attr = tag.attr("page")
            if attr is None and tag.attr("file") is not None:
                attr = tag.attr("file")
                self.diag(DiagnosticCode.NONSTANDARD_ATTRIBUTE,
                          "jsp:include uses 'file'; the standard attribute is 'page'", tag.start)
            if attr is not None and attr.value:
                extra = [("flush", tag.get("flush"))] if tag.get("flush") is not None else []
                self.url_ref(EdgeKind.JspIncludeAction, attr.value, extra, tag, parent=True, family="jsp")
            else:
                self.open_parent_without_ref(tag, "jsp")
        elif local == "forward":
            page = tag.get("page")
            if page:
                self.url_ref(EdgeKind.JspForwardAction, page, [], tag, parent=True, family="jsp")
            else:
                self.open_parent_without_ref(tag, "jsp")
        elif local == "param":
            self.add_param(tag, "jsp")
        elif local == "directive.include":
            f = tag.get("file")
            if f:
                self.url_ref(EdgeKind.IncludeDirective, f, [], tag)
        elif local == "directive.page":
            e = tag.get("errorPage")
            if e:
                self.url_ref(EdgeKind.ErrorPageDirective, e, [], tag)
        elif local == "useBean":
            bid = tag.get("id") or ""
            cls = tag.get("class") or tag.get("type") or tag.get("beanName") or ""
            scope = (tag.get("scope") or "page").strip() or "page"
            if bid and cls:
                self.use_beans.append(UseBeanDecl(bid.strip(), cls.strip(), scope, self.loc(tag.start)))
                self.add_ref(EdgeKind.UseBean, cls.strip(), [("id", bid.strip()), ("scope", scope)], tag.start)
        elif local == "getProperty":
            name, prop = tag.get("name"), tag.get("property")
            if name and prop:
                self.add_ref(EdgeKind.BeanGetProperty, name.strip(), [("property", prop.strip())], tag.start)
        elif local == "setProperty":
            name, prop = tag.get("name"), tag.get("property")
            if name and prop and prop.strip() != "*":
                extra = [("property", prop.strip())]
                for key in ("value", "param"):
                    if tag.get(key) is not None:
                        extra.append((key, tag.get(key)))
                self.add_ref(EdgeKind.BeanSetProperty, name.strip(), extra, tag.start)

    def jstl_tag(self, tag: Tag, local: str) -> None:
        if local == "redirect":
            self.family(tag, warn=True)
            url = tag.get("url")
            if url:
                self.url_ref(EdgeKind.JstlRedirect, url, [], tag, parent=True, family="jstl")
            else:
                self.open_parent_without_ref(tag, "jstl")
        elif local == "url":
            self.family(tag, warn=True)
            value = tag.get("value")
            extra = [(k, tag.get(k)) for k in ("var", "scope", "context") if tag.get(k) is not None]
            if value:
                self.url_ref(EdgeKind.JstlUrl, value, extra, tag, parent=True, family="jstl")
            else:
                self.open_parent_without_ref(tag, "jstl")
        elif local == "param":
            self.add_param(tag, "jstl")

    def jsf_command(self, tag: Tag, local: str) -> None:
        mechanism = EdgeKind.JsfCommandButton if local == "commandButton" else EdgeKind.JsfCommandLink
        action = tag.attr("action")
        if action is not None and action.value and action.value.strip():
            if not _pure_el(action.value):
                extra = [(a.name, a.value if a.value is not None else "") for a in tag.attrs
                         if a.name != "action" and not a.name.startswith("xmlns")]
                self.url_ref(mechanism, action.value, extra, tag)
        self.scan_attr_el(tag)

    def directive(self, d: Directive) -> None:
        if d.name == "include":
            f = d.get("file")
            if f:
                self.add_ref(EdgeKind.IncludeDirective, f.strip(), [], d.start)
        elif d.name == "page":
            e = d.get("errorPage")
            if e:
                self.add_ref(EdgeKind.ErrorPageDirective, e.strip(), [], d.start)


def _masked_scriptlets(text: str, scriptlets: List[Scriptlet]) -> str:
    """Text with everything outside scriptlet bodies blanked, newlines kept, so positions line up."""
    out = ["\n" if ch == "\n" else " " for ch in text]
    for s in scriptlets:
        body = text[s.body_start:s.body_end]
        body = body.replace("<![CDATA[", " " * 9).replace("]]>", "   ")
        out[s.body_start:s.body_end] = list(body)
    return "".join(out)


def scan_page(content: str, path: str, kind: ArtifactKind = ArtifactKind.JspPage) -> PageScanResult:
    interp = _Interpreter(content, path, kind)
    lexer = _Lexer(content, lambda code, msg, off: interp.diag(code, msg, off))
    items = lexer.run()
    interp.collect_bindings(items)
    scriptlets: List[Scriptlet] = []
    for it in items:
        if isinstance(it, Tag):
            interp.tag(it)
        elif kind is ArtifactKind.HtmlPage:
            continue
        elif isinstance(it, Directive):
            interp.directive(it)
        elif isinstance(it, Scriptlet):
            scriptlets.append(it)
        elif isinstance(it, Text):
            interp.scan_text_el(it)

    findings: List[DispatcherCall] = []
    if scriptlets:
        masked = _masked_scriptlets(content, scriptlets)
        findings = find_dispatcher_calls(tokenize(masked), path, scope_level=None)

    refs = tuple(
        RawPageRef(r.mechanism, r.url_or_name, tuple(r.params), tuple(r.attributes), interp.loc(r.start))
        for r in interp.refs
    )
    return PageScanResult(
        refs=refs,
        bindings=tuple(interp.bindings),
        scriptlet_findings=tuple(findings),
        el_expressions=tuple((raw, interp.loc(pos)) for raw, pos in interp.el),
        use_beans=tuple(interp.use_beans),
        diagnostics=tuple(interp.diagnostics),
    )
