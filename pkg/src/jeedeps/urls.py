"""URL-pattern classification and request-URL to handler resolution."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Union

from .descriptors import ServletTarget


class Shape(str, Enum):
    Exact = "Exact"
    PathPrefix = "PathPrefix"
    Extension = "Extension"
    Default = "Default"


class Origin(str, Enum):
    Descriptor = "Descriptor"
    Annotation = "Annotation"


@dataclass(frozen=True)
class UrlPattern:
    raw: str
    shape: Shape
    value: str = ""  # path for Exact, prefix for PathPrefix, extension for Extension
    canonical: bool = True


def classify_pattern(raw: str) -> UrlPattern:
    if raw in ("/*", "*"):
        return UrlPattern(raw, Shape.Default)
    if raw.endswith("/*"):
        return UrlPattern(raw, Shape.PathPrefix, raw[:-2], raw.startswith("/"))
    if raw.startswith("*."):
        return UrlPattern(raw, Shape.Extension, raw[2:])
    return UrlPattern(raw, Shape.Exact, raw, raw.startswith("/"))


@dataclass(frozen=True)
class MappingEntry:
    pattern: UrlPattern
    servlet_name: str
    origin: Origin
    location: Optional[object] = None


@dataclass
class UrlMappingTable:
    entries: List[MappingEntry] = field(default_factory=list)
    declarations: Dict[str, ServletTarget] = field(default_factory=dict)


@dataclass(frozen=True)
class ResolveOptions:
    case_insensitive_extensions: bool = False


@dataclass(frozen=True)
class Handler:
    servlet_name: str
    pattern: UrlPattern
    entry: MappingEntry


class _NoMatch:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoMatch"

    def __bool__(self) -> bool:
        return False


NoMatch = _NoMatch()


def _extension(url: str) -> Optional[str]:
    last = url.rsplit("/", 1)[-1]
    if "." not in last:
        return None
    return last.rsplit(".", 1)[-1]


def _prefix_matches(prefix: str, url: str) -> bool:
    return url == prefix or url.startswith(prefix + "/")


def resolve(url: str, table: UrlMappingTable, options: ResolveOptions = ResolveOptions()) -> Union[Handler, _NoMatch]:
    """Pick the handler for ``url``: exact, then longest path prefix, then extension, then default."""
    entries = table.entries
    for e in entries:
        if e.pattern.shape is Shape.Exact and e.pattern.value == url:
            return Handler(e.servlet_name, e.pattern, e)

    best = None
    for e in entries:
        if e.pattern.shape is Shape.PathPrefix and _prefix_matches(e.pattern.value, url):
            if best is None or len(e.pattern.value) > len(best.pattern.value):
                best = e
    if best is not None:
        return Handler(best.servlet_name, best.pattern, best)

    ext = _extension(url)
    if ext is not None:
        fold = str.lower if options.case_insensitive_extensions else (lambda s: s)
        for e in entries:
            if e.pattern.shape is Shape.Extension and fold(e.pattern.value) == fold(ext):
                return Handler(e.servlet_name, e.pattern, e)

    for e in entries:
        if e.pattern.shape is Shape.Default:
            return Handler(e.servlet_name, e.pattern, e)
    return NoMatch


# -- normalisation ---------------------------------------------------------

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


@dataclass(frozen=True)
class NormalizedUrl:
    """Result of normalize_url; ``external`` URLs keep their original text."""

    url: str
    external: bool = False
    clamped: bool = False


def normalize_url(raw: str, current_page_dir: str = "/", context_path: Optional[str] = None) -> NormalizedUrl:
    raw = raw.strip()
    if _SCHEME.match(raw) or raw.startswith("//"):
        return NormalizedUrl(raw, external=True)
    path = re.split(r"[?#]", raw, maxsplit=1)[0]
    if context_path:
        ctx = "/" + context_path.strip("/")
        if ctx != "/" and (path == ctx or path.startswith(ctx + "/")):
            path = path[len(ctx):] or "/"
    if not path.startswith("/"):
        base = current_page_dir if current_page_dir.endswith("/") else current_page_dir + "/"
        path = base + path
    return _collapse(path)


def _collapse(path: str) -> NormalizedUrl:
    trailing = path.endswith("/") or path.endswith("/.") or path.endswith("/..")
    stack: List[str] = []
    clamped = False
    for seg in path.split("/"):
        if seg in ("", "."):
            continue
        if seg == "..":
            if stack:
                stack.pop()
            else:
                clamped = True
            continue
        stack.append(seg)
    # like RFC 3986 reference resolution, surplus ".." segments stop at the root
    out = "/" + "/".join(stack)
    if trailing and stack:
        out += "/"
    return NormalizedUrl(out, clamped=clamped)


def page_dir(url_path: str) -> str:
    """Directory part of a page's context-relative URL, with trailing slash."""
    return url_path.rsplit("/", 1)[0] + "/"

