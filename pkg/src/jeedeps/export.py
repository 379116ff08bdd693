"""Graph serialisers: DOT, JSON (with a reader for round-trips) and a text summary."""
from __future__ import annotations

import json
from collections import Counter
from typing import Optional

from .model import (Artifact, ArtifactKind, BeanRef, DependencyEdge, DependencyGraph, Diagnostic,
                    DiagnosticCode, DynamicUrl, EdgeKind, ExternalUrl, ResolvedArtifact, Severity,
                    SourceLocation, TargetRef, UnresolvedUrl, is_unresolved)

_SHAPES = {
    ArtifactKind.ServletClass: "box",
    ArtifactKind.JspPage: "note",
    ArtifactKind.JsfPage: "tab",
    ArtifactKind.HtmlPage: "component",
    ArtifactKind.BeanClass: "ellipse",
    ArtifactKind.DeploymentDescriptor: "folder",
    ArtifactKind.FacesConfig: "folder",
    ArtifactKind.OtherJavaType: "box3d",
}


# -- JSON ------------------------------------------------------------------

def _loc_json(loc: Optional[SourceLocation]):
    if loc is None:
        return None
    return {"file": loc.file_path, "line": loc.line, "column": loc.column}


def _loc_from(data) -> Optional[SourceLocation]:
    if data is None:
        return None
    return SourceLocation(data["file"], data["line"], data["column"])


def target_json(target: TargetRef) -> dict:
    if isinstance(target, ResolvedArtifact):
        return {"type": "ResolvedArtifact", "artifact": target.artifact_id}
    if isinstance(target, UnresolvedUrl):
        return {"type": "UnresolvedUrl", "url": target.url}
    if isinstance(target, DynamicUrl):
        return {"type": "DynamicUrl", "reason": target.reason}
    if isinstance(target, BeanRef):
        out = {"type": "BeanRef", "name": target.name}
        if target.member is not None:
            out["member"] = target.member
        return out
    return {"type": "ExternalUrl", "url": target.url}


def target_from(data: dict) -> TargetRef:
    kind = data["type"]
    if kind == "ResolvedArtifact":
        return ResolvedArtifact(data["artifact"])
    if kind == "UnresolvedUrl":
        return UnresolvedUrl(data["url"])
    if kind == "DynamicUrl":
        return DynamicUrl(data["reason"])
    if kind == "BeanRef":
        return BeanRef(data["name"], data.get("member"))
    if kind == "ExternalUrl":
        return ExternalUrl(data["url"])
    raise ValueError(f"unknown target type {kind!r}")


def graph_to_dict(graph: DependencyGraph) -> dict:
    return {
        "artifacts": [
            {"id": a.id, "kind": a.kind.value, "path": a.path, "logical_names": list(a.logical_names)}
            for a in graph.artifacts
        ],
        "edges": [
            {
                "source": e.source,
                "target": target_json(e.target),
                "kind": e.kind.value,
                "location": _loc_json(e.location),
                "params": [list(p) for p in e.params],
                "attributes": [list(p) for p in e.attributes],
            }
            for e in graph.edges
        ],
        "diagnostics": [
            {"severity": d.severity.value, "code": d.code.value, "message": d.message,
             "location": _loc_json(d.location)}
            for d in graph.diagnostics
        ],
    }


def render_json(graph: DependencyGraph) -> str:
    return json.dumps(graph_to_dict(graph), indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str) -> DependencyGraph:
    data = json.loads(text)
    artifacts = tuple(Artifact(a["id"], ArtifactKind(a["kind"]), a["path"], tuple(a["logical_names"]))
                      for a in data["artifacts"])
    edges = tuple(
        DependencyEdge(e["source"], target_from(e["target"]), EdgeKind(e["kind"]), _loc_from(e["location"]),
                       tuple(tuple(p) for p in e["params"]), tuple(tuple(p) for p in e["attributes"]))
        for e in data["edges"]
    )
    diagnostics = tuple(Diagnostic(Severity(d["severity"]), DiagnosticCode(d["code"]), d["message"],
                                   _loc_from(d["location"]))
                        for d in data["diagnostics"])
    return DependencyGraph(artifacts, edges, diagnostics)


# -- DOT -------------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _synthetic_id(target: TargetRef) -> str:
    if isinstance(target, UnresolvedUrl):
        return f"unresolved:{target.url}"
    if isinstance(target, DynamicUrl):
        return f"dynamic:{target.reason}"
    if isinstance(target, BeanRef):
        return f"bean:{target.name}"
    return f"external:{target.url}"


def render_dot(graph: DependencyGraph) -> str:
    lines = ["digraph dependencies {", "  rankdir=LR;", "  node [fontsize=10];"]
    for a in graph.artifacts:
        lines.append(f"  {_q(a.id)} [label={_q(a.path)}, shape={_SHAPES[a.kind]}, kind={_q(a.kind.value)}];")
    synthetic = sorted({_synthetic_id(e.target) for e in graph.edges if not isinstance(e.target, ResolvedArtifact)})
    for sid in synthetic:
        lines.append(f"  {_q(sid)} [label={_q(sid)}, shape=plaintext, style=dashed];")
    for e in graph.edges:
        label = e.kind.value
        if e.params:
            label += "\n" + ", ".join(f"{k}={v}" for k, v in e.params)
        if isinstance(e.target, ResolvedArtifact):
            lines.append(f"  {_q(e.source)} -> {_q(e.target.artifact_id)} [label={_q(label)}];")
        else:
            lines.append(f"  {_q(e.source)} -> {_q(_synthetic_id(e.target))} [label={_q(label)}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- summary ---------------------------------------------------------------

def render_summary(graph: DependencyGraph) -> str:
    kinds = Counter(a.kind for a in graph.artifacts)
    edges = Counter(e.kind for e in graph.edges)
    unresolved = sum(1 for e in graph.edges if is_unresolved(e.target))
    dynamic = sum(1 for e in graph.edges if isinstance(e.target, DynamicUrl))
    out = [f"artifacts: {len(graph.artifacts)}"]
    out += [f"  {k.value}: {kinds[k]}" for k in ArtifactKind if kinds[k]]
    out.append(f"edges: {len(graph.edges)} (unresolved {unresolved}, dynamic {dynamic})")
    out += [f"  {k.value}: {edges[k]}" for k in EdgeKind if edges[k]]
    errors = sum(1 for d in graph.diagnostics if d.severity is Severity.Error)
    out.append(f"diagnostics: {len(graph.diagnostics)} ({errors} errors)")
    out += [f"  {d}" for d in graph.diagnostics]
    return "\n".join(out) + "\n"


RENDERERS = {"dot": render_dot, "json": render_json, "summary": render_summary}
