"""Project pipeline: discover files, scan them, resolve references, build the graph."""
from __future__ import annotations

import os
import posixpath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .descriptors import (ClassTarget, JspFileTarget, ManagedBeanRegistration, ServletDeclaration,
                          ServletMapping, ServletTarget, page_path, parse_faces_config, parse_web_xml)
from .el import parse_el
from .javascan import DispatchMethod, DispatcherCall, JavaScanResult, ServletKind, scan_java_source
from .model import (Artifact, ArtifactKind, BeanRef, DependencyEdge, DependencyGraph, Diagnostic,
                    DiagnosticCode, DynamicUrl, EdgeKind, ExternalUrl, GraphBuilder, ResolvedArtifact,
                    SourceLocation, TargetRef, UnresolvedUrl, URL_EDGE_KINDS, warning)
from .pagescan import RawPageRef, UseBeanDecl, scan_page
from .urls import (Handler, MappingEntry, Origin, ResolveOptions, UrlMappingTable, classify_pattern,
                   normalize_url, page_dir, resolve)

DEFAULT_EXTENSION_MAP = MappingProxyType({
    ".java": ArtifactKind.OtherJavaType,
    ".jsp": ArtifactKind.JspPage,
    ".jspx": ArtifactKind.JspPage,
    ".jspf": ArtifactKind.JspPage,
    ".xhtml": ArtifactKind.JsfPage,
    ".html": ArtifactKind.HtmlPage,
    ".htm": ArtifactKind.HtmlPage,
})
SPECIAL_FILES = MappingProxyType({
    "web.xml": ArtifactKind.DeploymentDescriptor,
    "faces-config.xml": ArtifactKind.FacesConfig,
})
CONVENTIONAL_WEB_ROOTS = ("src/main/webapp", "WebContent", "WebRoot", "webapp", "web")


@dataclass(frozen=True)
class AnalysisConfig:
    root: Path
    context_path: Optional[str] = None
    case_insensitive_extensions: bool = False
    include_unresolved: bool = True
    follow_symlinks: bool = False
    file_extension_map: Mapping[str, ArtifactKind] = DEFAULT_EXTENSION_MAP
    jobs: int = 1

    @property
    def resolve_options(self) -> ResolveOptions:
        return ResolveOptions(self.case_insensitive_extensions)


# -- discovery -------------------------------------------------------------

def classify_path(rel_path: str, extension_map: Mapping[str, ArtifactKind] = DEFAULT_EXTENSION_MAP
                  ) -> Optional[ArtifactKind]:
    name = posixpath.basename(rel_path)
    if name in SPECIAL_FILES:
        return SPECIAL_FILES[name]
    ext = posixpath.splitext(name)[1].lower()
    return extension_map.get(ext)


def _discover(root: Path, config: AnalysisConfig) -> Tuple[List[Tuple[str, ArtifactKind]], List[Diagnostic]]:
    found: List[Tuple[str, ArtifactKind]] = []
    diagnostics: List[Diagnostic] = []

    def onerror(exc: OSError) -> None:
        rel = os.path.relpath(exc.filename, root) if exc.filename else "."
        diagnostics.append(warning(DiagnosticCode.IO_ERROR, f"cannot list directory: {exc.strerror}",
                                   SourceLocation(Path(rel).as_posix())))

    for dirpath, dirnames, filenames in os.walk(root, onerror=onerror, followlinks=config.follow_symlinks):
        dirnames[:] = sorted(d for d in dirnames if not d.startswith("."))
        for name in filenames:
            full = os.path.join(dirpath, name)
            if not config.follow_symlinks and os.path.islink(full):
                continue
            rel = Path(os.path.relpath(full, root)).as_posix()
            kind = classify_path(rel, config.file_extension_map)
            if kind is not None:
                found.append((rel, kind))
    found.sort()
    return found, diagnostics


def discover(root: Path, config: AnalysisConfig) -> List[Tuple[str, ArtifactKind]]:
    """Analyzable files under root in lexicographic order; Java files start as OtherJavaType."""
    return _discover(Path(root), config)[0]


# -- per-file scanning -----------------------------------------------------

@dataclass(frozen=True)
class DescriptorScan:
    path: str
    declarations: Tuple[ServletDeclaration, ...]
    mappings: Tuple[ServletMapping, ...]


@dataclass(frozen=True)
class FileScan:
    path: str
    kind: ArtifactKind
    result: object  # DescriptorScan, registrations tuple, JavaScanResult or PageScanResult
    diagnostics: Tuple[Diagnostic, ...] = ()
    readable: bool = True


def read_text(path: Path) -> str:
    data = path.read_bytes()
    if data.startswith(b"\xef\xbb\xbf"):
        data = data[3:]
    return data.decode("utf-8", errors="replace")


def scan_file(root: Path, rel: str, kind: ArtifactKind) -> FileScan:
    try:
        content = read_text(root / rel)
    except OSError as exc:
        diag = warning(DiagnosticCode.IO_ERROR, f"cannot read file: {exc.strerror or exc}", SourceLocation(rel))
        return FileScan(rel, kind, None, (diag,), readable=False)
    if kind is ArtifactKind.DeploymentDescriptor:
        decls, maps, diags = parse_web_xml(content, rel)
        return FileScan(rel, kind, DescriptorScan(rel, tuple(decls), tuple(maps)), tuple(diags))
    if kind is ArtifactKind.FacesConfig:
        regs, diags = parse_faces_config(content, rel)
        return FileScan(rel, kind, tuple(regs), tuple(diags))
    if kind.is_java:
        result, diags = scan_java_source(content, rel)
        return FileScan(rel, kind, result, tuple(diags))
    page = scan_page(content, rel, kind)
    return FileScan(rel, kind, page, page.diagnostics)


# -- mapping table ---------------------------------------------------------

def build_mapping_table(descriptors: Sequence[DescriptorScan],
                        java_results: Mapping[str, JavaScanResult]) -> UrlMappingTable:
    """Descriptor entries in document order, then @WebServlet entries sorted by path."""
    table = UrlMappingTable()
    for desc in descriptors:
        for decl in desc.declarations:
            table.declarations.setdefault(decl.servlet_name, decl.target)
    for desc in descriptors:
        for mapping in desc.mappings:
            if mapping.servlet_name not in table.declarations:
                continue
            for i, raw in enumerate(mapping.url_patterns):
                loc = mapping.locations[i] if i < len(mapping.locations) else mapping.location
                table.entries.append(MappingEntry(classify_pattern(raw), mapping.servlet_name,
                                                  Origin.Descriptor, loc))
    for path in sorted(java_results):
        result = java_results[path]
        for finding in result.web_servlet_patterns:
            table.declarations.setdefault(result.type_name, ClassTarget(result.type_name))
            table.entries.append(MappingEntry(classify_pattern(finding.pattern), result.type_name,
                                              Origin.Annotation, finding.location))
    return table


# -- bean registry ---------------------------------------------------------

@dataclass(frozen=True)
class BeanEntry:
    name: str
    class_name: str
    source: str  # "config", "annotation" or "useBean"
    artifact_id: Optional[str]  # None marks an unresolved class
    location: SourceLocation
    scope: Optional[str] = None


@dataclass
class BeanRegistry:
    global_entries: Dict[str, List[BeanEntry]] = field(default_factory=dict)
    page_entries: Dict[Tuple[str, str], BeanEntry] = field(default_factory=dict)

    def lookup(self, name: str, page: Optional[str] = None) -> Optional[BeanEntry]:
        """Page-scoped useBean ids shadow global managed-bean names."""
        if page is not None and (page, name) in self.page_entries:
            return self.page_entries[(page, name)]
        entries = self.global_entries.get(name)
        return entries[0] if entries else None


def class_index(java_results: Mapping[str, JavaScanResult]) -> Dict[str, str]:
    index: Dict[str, str] = {}
    for path in sorted(java_results):
        index.setdefault(java_results[path].type_name, path)
    return index


def build_bean_registry(faces_config: Sequence[ManagedBeanRegistration],
                        java_results: Mapping[str, JavaScanResult],
                        use_beans: Mapping[str, Sequence[UseBeanDecl]]) -> Tuple[BeanRegistry, List[Diagnostic]]:
    classes = class_index(java_results)
    registry = BeanRegistry()
    diagnostics: List[Diagnostic] = []

    def add_global(entry: BeanEntry) -> None:
        existing = registry.global_entries.setdefault(entry.name, [])
        if existing:
            first = existing[0]
            diagnostics.append(warning(
                DiagnosticCode.DUP_BEAN_NAME,
                f"bean name {entry.name!r} registered by {first.source} ({first.class_name}) and by "
                f"{entry.source} ({entry.class_name}); using the {first.source} entry",
                entry.location))
        existing.append(entry)

    for reg in faces_config:
        add_global(BeanEntry(reg.bean_name, reg.bean_class, "config", classes.get(reg.bean_class),
                             reg.source.location))
    for path in sorted(java_results):
        result = java_results[path]
        if result.managed_bean is not None:
            add_global(BeanEntry(result.managed_bean.name, result.type_name, "annotation", path,
                                 result.managed_bean.location))
    for page in sorted(use_beans):
        for decl in use_beans[page]:
            registry.page_entries.setdefault((page, decl.id), BeanEntry(
                decl.id, decl.class_name, "useBean", classes.get(decl.class_name), decl.location, decl.scope))
    return registry, diagnostics


# -- resolution ------------------------------------------------------------

_DISPATCH_KIND = {
    (False, DispatchMethod.Forward): EdgeKind.DispatchForward,
    (False, DispatchMethod.Include): EdgeKind.DispatchInclude,
    (True, DispatchMethod.Forward): EdgeKind.ScriptletDispatchForward,
    (True, DispatchMethod.Include): EdgeKind.ScriptletDispatchInclude,
}


def web_roots(paths: Iterable[str]) -> List[str]:
    """Directories serving as context roots: parents of WEB-INF, else conventional names."""
    roots = set()
    paths = list(paths)
    for p in paths:
        parts = p.split("/")
        if "WEB-INF" in parts[:-1]:
            roots.add("/".join(parts[:parts.index("WEB-INF")]))
    if not roots:
        for p in paths:
            for conv in CONVENTIONAL_WEB_ROOTS:
                if p.startswith(conv + "/"):
                    roots.add(conv)
    return sorted(roots, key=len, reverse=True)


def url_path_of(path: str, roots: Sequence[str]) -> str:
    for root in roots:
        if root == "":
            return "/" + path
        if path.startswith(root + "/"):
            return path[len(root):]
    return "/" + path


class _Resolver:
    def __init__(self, config: AnalysisConfig, table: UrlMappingTable, pages: Dict[str, str],
                 classes: Dict[str, str], registry: BeanRegistry) -> None:
        self.config = config
        self.table = table
        self.pages = pages  # context-relative URL path -> artifact id
        self.classes = classes
        self.registry = registry
        self.diagnostics: List[Diagnostic] = []

    def handler_artifact(self, target: ServletTarget) -> Optional[str]:
        if isinstance(target, ClassTarget):
            return self.classes.get(target.class_name)
        return self.pages.get(page_path(target))

    def url(self, raw: str, base_dir: str, location: SourceLocation, kind: Optional[EdgeKind] = None
            ) -> Tuple[Optional[TargetRef], List[Tuple[str, str]]]:
        """Resolve a URL reference: mapping table first, then the file tree."""
        raw = raw.strip()
        if "${" in raw or "#{" in raw:
            return DynamicUrl("URL contains an EL expression"), []
        if "<%" in raw:
            return DynamicUrl("URL contains a JSP expression"), []
        norm = normalize_url(raw, base_dir, self.config.context_path)
        if norm.external:
            return ExternalUrl(norm.url), []
        if norm.clamped:
            self.diagnostics.append(warning(DiagnosticCode.PATH_ESCAPE,
                                            f"URL {raw!r} climbs above the context root; surplus '..' segments dropped",
                                            location))
        handler = resolve(norm.url, self.table, self.config.resolve_options)
        if isinstance(handler, Handler):
            target = self.table.declarations.get(handler.servlet_name)
            art = self.handler_artifact(target) if target is not None else None
            if art is not None:
                return ResolvedArtifact(art), [("servlet_name", handler.servlet_name),
                                               ("pattern", handler.pattern.raw)]
        candidates = [norm.url]
        if kind in (EdgeKind.JsfCommandButton, EdgeKind.JsfCommandLink) and "." not in norm.url.rsplit("/", 1)[-1]:
            candidates += [norm.url + ".xhtml", norm.url + ".jsp"]
        for cand in candidates:
            if cand in self.pages:
                return ResolvedArtifact(self.pages[cand]), []
        if not self.config.include_unresolved:
            return None, []
        return UnresolvedUrl(norm.url), []

    def bean(self, name: str, member: Optional[str], page: Optional[str]) -> Tuple[Optional[TargetRef], List]:
        entry = self.registry.lookup(name, page)
        if entry is not None and entry.artifact_id is not None:
            extra = [("bean", name)] + ([("member", member)] if member else [])
            return ResolvedArtifact(entry.artifact_id), extra
        if not self.config.include_unresolved:
            return None, []
        return BeanRef(name, member), []


def _java_kind(result: JavaScanResult, bean_classes: set) -> ArtifactKind:
    if result.servlet_kind is not ServletKind.NotAServlet or result.web_servlet_patterns:
        return ArtifactKind.ServletClass
    if result.managed_bean is not None or result.type_name in bean_classes or result.bean_traits.looks_like_bean:
        return ArtifactKind.BeanClass
    return ArtifactKind.OtherJavaType


def _scan_all(root: Path, entries: Sequence[Tuple[str, ArtifactKind]], jobs: int) -> List[FileScan]:
    if jobs > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda e: scan_file(root, e[0], e[1]), entries))
    return [scan_file(root, rel, kind) for rel, kind in entries]


def analyze_project(config: AnalysisConfig) -> DependencyGraph:
    root = Path(config.root)
    entries, discovery_diags = _discover(root, config)
    scans = _scan_all(root, entries, max(1, config.jobs))

    builder = GraphBuilder()
    builder.diagnostics.extend(discovery_diags)
    for scan in scans:
        builder.diagnostics.extend(scan.diagnostics)
    scans = [s for s in scans if s.readable]

    descriptors = [s.result for s in scans if s.kind is ArtifactKind.DeploymentDescriptor]
    registrations = [r for s in scans if s.kind is ArtifactKind.FacesConfig for r in s.result]
    java = {s.path: s.result for s in scans if s.kind.is_java}
    pages = {s.path: s.result for s in scans if s.kind.is_page}
    use_beans = {p: r.use_beans for p, r in pages.items() if r.use_beans}

    table = build_mapping_table(descriptors, java)
    for entry in table.entries:
        if not entry.pattern.canonical:
            builder.diagnostics.append(warning(DiagnosticCode.NONCANONICAL_PATTERN,
                                               f"url-pattern {entry.pattern.raw!r} is neither path nor extension form",
                                               entry.location))
    registry, reg_diags = build_bean_registry(registrations, java, use_beans)
    builder.diagnostics.extend(reg_diags)
    classes = class_index(java)

    roots = web_roots([s.path for s in scans])
    page_urls = {s.path: url_path_of(s.path, roots) for s in scans if s.kind.is_page}
    url_index: Dict[str, str] = {}
    for path in sorted(page_urls):
        url_index.setdefault(page_urls[path], path)

    # artifacts and their logical names
    names: Dict[str, set] = {s.path: set() for s in scans}
    for path, result in java.items():
        names[path].add(result.type_name)
    for entries_ in registry.global_entries.values():
        for e in entries_:
            if e.artifact_id is not None:
                names[e.artifact_id].add(e.name)
    for name, target in table.declarations.items():
        if isinstance(target, ClassTarget) and target.class_name in classes:
            names[classes[target.class_name]].add(name)
        elif isinstance(target, JspFileTarget) and page_path(target) in url_index:
            names[url_index[page_path(target)]].add(name)
    bean_classes = {r.bean_class for r in registrations}
    bean_classes |= {d.class_name for decls in use_beans.values() for d in decls}
    for scan in scans:
        kind = _java_kind(scan.result, bean_classes) if scan.kind.is_java else scan.kind
        builder.add_artifact(Artifact.for_path(scan.path, kind, names[scan.path]))

    resolver = _Resolver(config, table, url_index, classes, registry)

    def add(source: str, target: Optional[TargetRef], kind: EdgeKind, loc: SourceLocation,
            params=(), attributes=()) -> None:
        if target is not None:
            builder.add_edge(DependencyEdge(source, target, kind, loc, tuple(params), tuple(attributes)))

    # deployment descriptor mappings
    for desc in descriptors:
        for mapping in desc.mappings:
            target = table.declarations.get(mapping.servlet_name)
            if target is None:
                continue
            decl_params = next((d.init_params for d in desc.declarations if d.servlet_name == mapping.servlet_name), ())
            art = resolver.handler_artifact(target)
            handler = target.class_name if isinstance(target, ClassTarget) else target.page
            for i, raw in enumerate(mapping.url_patterns):
                loc = mapping.locations[i] if i < len(mapping.locations) else mapping.location
                if art is not None:
                    tgt: Optional[TargetRef] = ResolvedArtifact(art)
                else:
                    tgt = UnresolvedUrl(raw) if config.include_unresolved else None
                add(desc.path, tgt, EdgeKind.UrlMapping, loc, decl_params,
                    [("servlet_name", mapping.servlet_name), ("pattern", raw), ("handler", handler)])

    # java sources
    for path in sorted(java):
        result = java[path]
        for call in result.dispatcher_calls:
            _dispatch_edge(add, resolver, path, "/", call, scriptlet=False)
        for prop in result.managed_properties:
            expr, diags = parse_el(prop.expression, prop.location)
            builder.diagnostics.extend(diags)
            for ref in expr.references:
                if ref.implicit:
                    continue
                tgt, extra = resolver.bean(ref.base, ref.member, None)
                add(path, tgt, EdgeKind.ManagedPropertyInjection, prop.location, (),
                    [("field", prop.field_name), ("expression", prop.expression)] + extra)

    # faces-config managed-property values
    for reg in registrations:
        # from the bean class when it is in the project, else from the config file
        source = classes.get(reg.bean_class) or reg.source.location.file_path
        for prop_name, value in reg.properties:
            if "#{" not in value and "${" not in value:
                continue
            expr, diags = parse_el(value.strip(), reg.source.location)
            builder.diagnostics.extend(diags)
            for ref in expr.references:
                if ref.implicit:
                    continue
                tgt, extra = resolver.bean(ref.base, ref.member, None)
                add(source, tgt, EdgeKind.ManagedPropertyInjection, reg.source.location, (),
                    [("field", prop_name), ("expression", value.strip())] + extra)

    # pages
    for path in sorted(pages):
        result = pages[path]
        base_dir = page_dir(page_urls[path])
        for ref in result.refs:
            _page_edge(add, resolver, builder, path, base_dir, ref)
        for call in result.scriptlet_findings:
            _dispatch_edge(add, resolver, path, base_dir, call, scriptlet=True)

    builder.diagnostics.extend(resolver.diagnostics)
    return builder.freeze()


def _dispatch_edge(add, resolver: _Resolver, source: str, base_dir: str, call: DispatcherCall,
                   scriptlet: bool) -> None:
    kind = _DISPATCH_KIND[(scriptlet, call.method)]
    attrs = [("scenario", call.scenario.value)]
    if call.url is None:
        add(source, DynamicUrl(call.dynamic_reason or "non-literal URL"), kind, call.location, (), attrs)
        return
    tgt, extra = resolver.url(call.url, base_dir, call.location)
    add(source, tgt, kind, call.location, (), attrs + [("url", call.url)] + extra)


def _page_edge(add, resolver: _Resolver, builder: GraphBuilder, page: str, base_dir: str, ref: RawPageRef) -> None:
    kind = ref.mechanism
    if kind in URL_EDGE_KINDS:
        tgt, extra = resolver.url(ref.url_or_name, base_dir, ref.location, kind)
        add(page, tgt, kind, ref.location, ref.params, list(ref.attributes) + [("url", ref.url_or_name)] + extra)
    elif kind is EdgeKind.ElReference:
        expr, diags = parse_el(ref.url_or_name, ref.location)
        builder.diagnostics.extend(diags)
        for el_ref in expr.references:
            if el_ref.implicit:
                continue
            tgt, extra = resolver.bean(el_ref.base, el_ref.member, page)
            add(page, tgt, kind, ref.location, (),
                [("expression", ref.url_or_name)] + list(ref.attributes) + extra)
    elif kind is EdgeKind.UseBean:
        art = resolver.classes.get(ref.url_or_name)
        if art is not None:
            tgt: Optional[TargetRef] = ResolvedArtifact(art)
        else:
            tgt = BeanRef(ref.url_or_name) if resolver.config.include_unresolved else None
        add(page, tgt, kind, ref.location, ref.params, list(ref.attributes) + [("class", ref.url_or_name)])
    elif kind in (EdgeKind.BeanGetProperty, EdgeKind.BeanSetProperty):
        prop = dict(ref.attributes).get("property")
        tgt, extra = resolver.bean(ref.url_or_name, prop, page)
        add(page, tgt, kind, ref.location, ref.params, list(ref.attributes) + extra)
