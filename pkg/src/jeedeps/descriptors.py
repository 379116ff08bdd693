"""Parsers for web.xml and faces-config.xml.

Both run on a non-validating expat parse with DTD loading and entity
declarations refused. Element names are matched on their local part, so any
namespace or prefix on <web-app> is irrelevant. A parse error keeps whatever
the well-formed prefix produced and adds a MALFORMED_XML error.
"""
from __future__ import annotations

import posixpath
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union
from xml.parsers import expat

from .model import Diagnostic, DiagnosticCode, SourceLocation, error, warning

_PAGE_SUFFIXES = (".jsp", ".jspx", ".xhtml", ".html", ".htm")


@dataclass(frozen=True)
class ClassTarget:
    class_name: str


@dataclass(frozen=True)
class JspFileTarget:
    page: str


ServletTarget = Union[ClassTarget, JspFileTarget]


@dataclass(frozen=True)
class ServletDeclaration:
    servlet_name: str
    target: ServletTarget
    init_params: Tuple[Tuple[str, str], ...] = ()
    location: Optional[SourceLocation] = None


@dataclass(frozen=True)
class ServletMapping:
    servlet_name: str
    url_patterns: Tuple[str, ...]
    locations: Tuple[SourceLocation, ...] = ()
    location: Optional[SourceLocation] = None


@dataclass(frozen=True)
class ConfigFile:
    location: SourceLocation


@dataclass(frozen=True)
class Annotation:
    location: SourceLocation


@dataclass(frozen=True)
class ManagedBeanRegistration:
    bean_name: str
    bean_class: str
    source: Union[ConfigFile, Annotation]
    properties: Tuple[Tuple[str, str], ...] = ()


# -- tolerant element tree -------------------------------------------------

@dataclass
class Element:
    name: str
    line: int
    column: int
    attrs: dict = field(default_factory=dict)
    children: List["Element"] = field(default_factory=list)
    chunks: List[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "".join(self.chunks).strip()

    def iter(self, name: str):
        for child in self.children:
            if child.name == name:
                yield child
            yield from child.iter(name)

    def child_text(self, name: str) -> Optional[str]:
        for child in self.children:
            if child.name == name:
                return child.text
        return None


class _Refused(Exception):
    pass


def _local(name: str) -> str:
    return name.rsplit(":", 1)[-1]


def parse_xml(content: str, path: str) -> Tuple[Element, List[Diagnostic]]:
    """Build an element tree from as much of ``content`` as parses."""
    root = Element("#document", 1, 1)
    stack = [root]
    parser = expat.ParserCreate()
    parser.SetParamEntityParsing(expat.XML_PARAM_ENTITY_PARSING_NEVER)

    def start(name, attrs):
        el = Element(_local(name), parser.CurrentLineNumber, parser.CurrentColumnNumber + 1,
                     {_local(k): v for k, v in attrs.items()})
        stack[-1].children.append(el)
        stack.append(el)

    def end(name):
        if len(stack) > 1:
            stack.pop()

    def chars(data):
        stack[-1].chunks.append(data)

    def refuse_entity(*args):
        raise _Refused("entity declarations are not supported")

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.EntityDeclHandler = refuse_entity
    diagnostics: List[Diagnostic] = []
    try:
        parser.Parse(content.encode("utf-8", "replace"), True)
    except expat.ExpatError as exc:
        diagnostics.append(error(DiagnosticCode.MALFORMED_XML, expat.ErrorString(exc.code),
                                 SourceLocation(path, max(exc.lineno, 1), exc.offset + 1)))
    except _Refused as exc:
        diagnostics.append(error(DiagnosticCode.MALFORMED_XML, str(exc),
                                 SourceLocation(path, max(parser.CurrentLineNumber, 1),
                                                parser.CurrentColumnNumber + 1)))
    return root, diagnostics


def _at(path: str, el: Element) -> SourceLocation:
    return SourceLocation(path, max(el.line, 1), max(el.column, 1))


def _segments(block: Element, head: str) -> List[Tuple[Element, List[Element]]]:
    """Split a block's children into groups, each starting at a ``head`` element.

    Children seen before the first head belong to the first group.
    """
    groups: List[Tuple[Element, List[Element]]] = []
    leading: List[Element] = []
    for child in block.children:
        if child.name == head:
            groups.append((child, []))
        elif groups:
            groups[-1][1].append(child)
        else:
            leading.append(child)
    if groups and leading:
        groups[0] = (groups[0][0], leading + groups[0][1])
    return groups


def _looks_like_class(value: str) -> bool:
    return "/" not in value and not value.lower().endswith(_PAGE_SUFFIXES)


# -- web.xml ---------------------------------------------------------------

def parse_web_xml(content: str, path: str) -> Tuple[List[ServletDeclaration], List[ServletMapping], List[Diagnostic]]:
    root, diagnostics = parse_xml(content, path)
    declarations: List[ServletDeclaration] = []
    by_name: dict = {}

    for block in root.iter("servlet"):
        for name_el, members in _segments(block, "servlet-name"):
            name = name_el.text
            loc = _at(path, name_el)
            targets = [m for m in members if m.name in ("servlet-class", "jsp-file") and m.text]
            if not name or not targets:
                diagnostics.append(warning(DiagnosticCode.INVALID_SERVLET_DECLARATION,
                                           f"servlet {name or '(unnamed)'} has no servlet-class or jsp-file", loc))
                continue
            if len(targets) > 1:
                diagnostics.append(warning(DiagnosticCode.INVALID_SERVLET_DECLARATION,
                                           f"servlet {name} declares more than one target; using the first",
                                           _at(path, targets[1])))
            chosen = targets[0]
            if chosen.name == "servlet-class":
                target: ServletTarget = ClassTarget(chosen.text)
            elif _looks_like_class(chosen.text):
                diagnostics.append(warning(DiagnosticCode.RECLASSIFIED_TARGET,
                                           f"jsp-file {chosen.text!r} names a class; treated as servlet-class",
                                           _at(path, chosen)))
                target = ClassTarget(chosen.text)
            else:
                target = JspFileTarget(chosen.text)
            params = tuple(
                (m.child_text("param-name") or "", m.child_text("param-value") or "")
                for m in members if m.name == "init-param"
            )
            decl = ServletDeclaration(name, target, params, loc)
            if name in by_name:
                diagnostics.append(warning(DiagnosticCode.DUP_SERVLET_NAME,
                                           f"servlet-name {name} declared again; the first declaration is kept",
                                           loc))
                continue
            by_name[name] = decl
            declarations.append(decl)

    mappings: List[ServletMapping] = []
    for block in root.iter("servlet-mapping"):
        merged: List[Tuple[str, Element, List[Element]]] = []
        for name_el, members in _segments(block, "servlet-name"):
            patterns = [m for m in members if m.name == "url-pattern" and m.text]
            if merged and merged[-1][0] == name_el.text:
                merged[-1][2].extend(patterns)
            else:
                merged.append((name_el.text, name_el, patterns))
        for name, name_el, patterns in merged:
            loc = _at(path, name_el)
            if not name or not patterns:
                diagnostics.append(warning(DiagnosticCode.INVALID_SERVLET_DECLARATION,
                                           f"servlet-mapping {name or '(unnamed)'} has no url-pattern", loc))
                continue
            if name not in by_name:
                diagnostics.append(warning(DiagnosticCode.UNKNOWN_SERVLET_NAME,
                                           f"servlet-mapping refers to undeclared servlet-name {name}", loc))
            mappings.append(ServletMapping(name, tuple(p.text for p in patterns),
                                           tuple(_at(path, p) for p in patterns), loc))
    return declarations, mappings, diagnostics


# -- faces-config.xml ------------------------------------------------------

def parse_faces_config(content: str, path: str) -> Tuple[List[ManagedBeanRegistration], List[Diagnostic]]:
    root, diagnostics = parse_xml(content, path)
    registrations: List[ManagedBeanRegistration] = []
    for block in root.iter("managed-bean"):
        name = block.child_text("managed-bean-name")
        cls = block.child_text("managed-bean-class")
        loc = _at(path, block)
        if not name or not cls:
            diagnostics.append(warning(DiagnosticCode.INCOMPLETE_MANAGED_BEAN,
                                       "managed-bean without name or class skipped", loc))
            continue
        props = tuple(
            (p.child_text("property-name") or "", p.child_text("value") or "")
            for p in block.children if p.name == "managed-property"
        )
        registrations.append(ManagedBeanRegistration(name, cls, ConfigFile(loc), props))
    return registrations, diagnostics


def page_path(target: JspFileTarget) -> str:
    """Context-relative path of a jsp-file target."""
    value = target.page.strip()
    return posixpath.normpath("/" + value.lstrip("/"))
