"""Shared vocabulary: artifacts, edges, targets, diagnostics and the graph."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Tuple, Union

Pairs = Tuple[Tuple[str, str], ...]


@dataclass(frozen=True, order=True)
class SourceLocation:
    file_path: str
    line: int = 1
    column: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError(f"location must be 1-based, got {self.line}:{self.column}")
        if "\\" in self.file_path:
            object.__setattr__(self, "file_path", self.file_path.replace("\\", "/"))

    def __str__(self) -> str:
        return f"{self.file_path}:{self.line}:{self.column}"


class ArtifactKind(str, Enum):
    ServletClass = "ServletClass"
    JspPage = "JspPage"
    JsfPage = "JsfPage"
    HtmlPage = "HtmlPage"
    BeanClass = "BeanClass"
    DeploymentDescriptor = "DeploymentDescriptor"
    FacesConfig = "FacesConfig"
    OtherJavaType = "OtherJavaType"

    @property
    def rank(self) -> int:
        return _KIND_ORDER.index(self)

    @property
    def is_page(self) -> bool:
        return self in (ArtifactKind.JspPage, ArtifactKind.JsfPage, ArtifactKind.HtmlPage)

    @property
    def is_java(self) -> bool:
        return self in (ArtifactKind.ServletClass, ArtifactKind.BeanClass, ArtifactKind.OtherJavaType)


_KIND_ORDER = list(ArtifactKind)


class EdgeKind(str, Enum):
    DispatchForward = "DispatchForward"
    DispatchInclude = "DispatchInclude"
    HtmlFormAction = "HtmlFormAction"
    JspIncludeAction = "JspIncludeAction"
    IncludeDirective = "IncludeDirective"
    JspForwardAction = "JspForwardAction"
    JstlRedirect = "JstlRedirect"
    JstlUrl = "JstlUrl"
    ScriptletDispatchForward = "ScriptletDispatchForward"
    ScriptletDispatchInclude = "ScriptletDispatchInclude"
    ErrorPageDirective = "ErrorPageDirective"
    JsfCommandButton = "JsfCommandButton"
    JsfCommandLink = "JsfCommandLink"
    HrefLink = "HrefLink"
    UseBean = "UseBean"
    BeanGetProperty = "BeanGetProperty"
    BeanSetProperty = "BeanSetProperty"
    ElReference = "ElReference"
    ManagedPropertyInjection = "ManagedPropertyInjection"
    UrlMapping = "UrlMapping"

    @property
    def rank(self) -> int:
        return _EDGE_ORDER.index(self)


_EDGE_ORDER = list(EdgeKind)

# Page-level kinds whose target is a URL (as opposed to a bean).
URL_EDGE_KINDS = frozenset({
    EdgeKind.HtmlFormAction,
    EdgeKind.JspIncludeAction,
    EdgeKind.IncludeDirective,
    EdgeKind.JspForwardAction,
    EdgeKind.JstlRedirect,
    EdgeKind.JstlUrl,
    EdgeKind.ErrorPageDirective,
    EdgeKind.JsfCommandButton,
    EdgeKind.JsfCommandLink,
    EdgeKind.HrefLink,
})


@dataclass(frozen=True)
class Artifact:
    id: str
    kind: ArtifactKind
    path: str
    logical_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "logical_names", tuple(sorted(set(self.logical_names))))

    @classmethod
    def for_path(cls, path: str, kind: ArtifactKind, logical_names: Iterable[str] = ()) -> "Artifact":
        return cls(id=artifact_id(path), kind=kind, path=path, logical_names=tuple(logical_names))


def artifact_id(path: str) -> str:
    """Ids are the project-relative path itself: stable across runs and machines."""
    return path.replace("\\", "/")


# -- targets ---------------------------------------------------------------

@dataclass(frozen=True)
class ResolvedArtifact:
    artifact_id: str


@dataclass(frozen=True)
class UnresolvedUrl:
    url: str


@dataclass(frozen=True)
class DynamicUrl:
    reason: str


@dataclass(frozen=True)
class BeanRef:
    name: str
    member: Optional[str] = None


@dataclass(frozen=True)
class ExternalUrl:
    url: str


TargetRef = Union[ResolvedArtifact, UnresolvedUrl, DynamicUrl, BeanRef, ExternalUrl]

TARGET_TYPES = (ResolvedArtifact, UnresolvedUrl, DynamicUrl, BeanRef, ExternalUrl)


def target_key(target: TargetRef) -> Tuple[str, str, str]:
    """Total order over targets, used to keep edge output deterministic."""
    if isinstance(target, ResolvedArtifact):
        return ("ResolvedArtifact", target.artifact_id, "")
    if isinstance(target, UnresolvedUrl):
        return ("UnresolvedUrl", target.url, "")
    if isinstance(target, DynamicUrl):
        return ("DynamicUrl", target.reason, "")
    if isinstance(target, BeanRef):
        return ("BeanRef", target.name, target.member if target.member is not None else "\0")
    if isinstance(target, ExternalUrl):
        return ("ExternalUrl", target.url, "")
    raise TypeError(f"not a target: {target!r}")


def is_unresolved(target: TargetRef) -> bool:
    return isinstance(target, (UnresolvedUrl, BeanRef))


# -- edges and diagnostics -------------------------------------------------

@dataclass(frozen=True)
class DependencyEdge:
    source: str
    target: TargetRef
    kind: EdgeKind
    location: SourceLocation
    params: Pairs = ()
    attributes: Pairs = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple((str(k), str(v)) for k, v in self.params))
        object.__setattr__(self, "attributes", tuple((str(k), str(v)) for k, v in self.attributes))

    @property
    def identity(self) -> tuple:
        """Two edges are duplicates iff these fields match."""
        return (self.source, self.target, self.kind, self.location)

    def sort_key(self) -> tuple:
        return (self.source, self.location, self.kind.rank, target_key(self.target),
                self.params, self.attributes)

    def attribute(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.attributes:
            if k == key:
                return v
        return default


class Severity(str, Enum):
    Warning = "Warning"
    Error = "Error"


class DiagnosticCode(str, Enum):
    MALFORMED_XML = "MALFORMED_XML"
    UNKNOWN_SERVLET_NAME = "UNKNOWN_SERVLET_NAME"
    DUP_SERVLET_NAME = "DUP_SERVLET_NAME"
    RECLASSIFIED_TARGET = "RECLASSIFIED_TARGET"
    INVALID_SERVLET_DECLARATION = "INVALID_SERVLET_DECLARATION"
    INCOMPLETE_MANAGED_BEAN = "INCOMPLETE_MANAGED_BEAN"
    UNBALANCED_SOURCE = "UNBALANCED_SOURCE"
    UNDECLARED_TAGLIB_PREFIX = "UNDECLARED_TAGLIB_PREFIX"
    UNTERMINATED_CONSTRUCT = "UNTERMINATED_CONSTRUCT"
    NONSTANDARD_ATTRIBUTE = "NONSTANDARD_ATTRIBUTE"
    MALFORMED_EL = "MALFORMED_EL"
    NONCANONICAL_PATTERN = "NONCANONICAL_PATTERN"
    PATH_ESCAPE = "PATH_ESCAPE"
    DUP_BEAN_NAME = "DUP_BEAN_NAME"
    ARTIFACT_KIND_CONFLICT = "ARTIFACT_KIND_CONFLICT"
    IO_ERROR = "IO_ERROR"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: DiagnosticCode
    message: str
    location: Optional[SourceLocation] = None

    def sort_key(self) -> tuple:
        loc = self.location
        where = ("", 0, 0) if loc is None else (loc.file_path, loc.line, loc.column)
        return (loc is not None, where, self.code.value, self.severity.value, self.message)

    def __str__(self) -> str:
        where = f"{self.location}: " if self.location else ""
        return f"{where}{self.severity.value.lower()}: {self.code.value}: {self.message}"


def warning(code: DiagnosticCode, message: str, location: Optional[SourceLocation] = None) -> Diagnostic:
    return Diagnostic(Severity.Warning, code, message, location)


def error(code: DiagnosticCode, message: str, location: Optional[SourceLocation] = None) -> Diagnostic:
    return Diagnostic(Severity.Error, code, message, location)


# -- graph -----------------------------------------------------------------

@dataclass(frozen=True)
class DependencyGraph:
    """Canonical, immutable graph.

    Construction sorts artifacts by (kind, path), sorts edges by
    (source, location, kind, target) and drops duplicate edges, keeping the
    smallest by full sort key so the result does not depend on input order.
    """

    artifacts: Tuple[Artifact, ...] = ()
    edges: Tuple[DependencyEdge, ...] = ()
    diagnostics: Tuple[Diagnostic, ...] = ()

    def __post_init__(self) -> None:
        seen: dict[str, Artifact] = {}
        for art in self.artifacts:
            seen.setdefault(art.id, art)
        arts = tuple(sorted(seen.values(), key=lambda a: (a.kind.rank, a.path, a.id)))
        object.__setattr__(self, "artifacts", arts)
        object.__setattr__(self, "edges", _canonical_edges(self.edges))
        object.__setattr__(self, "diagnostics", tuple(sorted(self.diagnostics, key=Diagnostic.sort_key)))

    def artifact(self, artifact_id: str) -> Optional[Artifact]:
        for art in self.artifacts:
            if art.id == artifact_id:
                return art
        return None

    @property
    def artifact_ids(self) -> frozenset:
        return frozenset(a.id for a in self.artifacts)

    def add_edge(self, edge: DependencyEdge) -> "DependencyGraph":
        return add_edge(self, edge)


def _canonical_edges(edges: Iterable[DependencyEdge]) -> Tuple[DependencyEdge, ...]:
    out: list[DependencyEdge] = []
    seen: set = set()
    for edge in sorted(edges, key=DependencyEdge.sort_key):
        if edge.identity in seen:
            continue
        seen.add(edge.identity)
        out.append(edge)
    return tuple(out)


def add_edge(graph: DependencyGraph, edge: DependencyEdge) -> DependencyGraph:
    if edge.source not in graph.artifact_ids:
        raise ValueError(f"edge source {edge.source!r} is not an artifact of this graph")
    if any(e.identity == edge.identity for e in graph.edges):
        return graph
    return replace(graph, edges=graph.edges + (edge,))


def merge(graphs: Iterable[DependencyGraph]) -> DependencyGraph:
    """Union of partial graphs.

    Artifacts sharing an id but disagreeing on kind keep the first-seen kind
    and raise an ARTIFACT_KIND_CONFLICT error; agreeing ones pool their
    logical names.
    """
    graphs = list(graphs)
    if len(graphs) == 1:
        return graphs[0]
    by_id: dict[str, Artifact] = {}
    edges: list[DependencyEdge] = []
    diagnostics: list[Diagnostic] = []
    for graph in graphs:
        for art in graph.artifacts:
            prev = by_id.get(art.id)
            if prev is None:
                by_id[art.id] = art
            elif prev.kind != art.kind:
                diagnostics.append(error(
                    DiagnosticCode.ARTIFACT_KIND_CONFLICT,
                    f"artifact {art.id} seen as {prev.kind.value} and {art.kind.value}; keeping {prev.kind.value}",
                    SourceLocation(art.path),
                ))
            else:
                by_id[art.id] = replace(prev, logical_names=prev.logical_names + art.logical_names)
        edges.extend(graph.edges)
        diagnostics.extend(graph.diagnostics)
    return DependencyGraph(tuple(by_id.values()), tuple(edges), tuple(diagnostics))


@dataclass
class GraphBuilder:
    """Mutable accumulator used while a graph is assembled; freeze() yields the value."""

    artifacts: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def add_artifact(self, artifact: Artifact) -> None:
        self.artifacts.setdefault(artifact.id, artifact)

    def add_edge(self, edge: DependencyEdge) -> None:
        if edge.source not in self.artifacts:
            raise ValueError(f"edge source {edge.source!r} is not a known artifact")
        self.edges.append(edge)

    def freeze(self) -> DependencyGraph:
        return DependencyGraph(tuple(self.artifacts.values()), tuple(self.edges), tuple(self.diagnostics))
