"""Static dependency extraction for the web tier of JEE applications."""
from __future__ import annotations

from .build import AnalysisConfig, analyze_project, build_bean_registry, build_mapping_table, discover
from .el import parse_el
from .export import parse_json, render_dot, render_json, render_summary
from .model import (Artifact, ArtifactKind, BeanRef, DependencyEdge, DependencyGraph, Diagnostic,
                    DiagnosticCode, DynamicUrl, EdgeKind, ExternalUrl, ResolvedArtifact, Severity,
                    SourceLocation, UnresolvedUrl, add_edge, merge)
from .urls import NoMatch, classify_pattern, normalize_url, resolve

__all__ = [
    "AnalysisConfig", "analyze_project", "build_bean_registry", "build_mapping_table", "discover",
    "parse_el", "parse_json", "render_dot", "render_json", "render_summary",
    "Artifact", "ArtifactKind", "BeanRef", "DependencyEdge", "DependencyGraph", "Diagnostic",
    "DiagnosticCode", "DynamicUrl", "EdgeKind", "ExternalUrl", "ResolvedArtifact", "Severity",
    "SourceLocation", "UnresolvedUrl", "add_edge", "merge",
    "NoMatch", "classify_pattern", "normalize_url", "resolve",
]
