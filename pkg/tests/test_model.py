from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jeedeps.model import (Artifact, ArtifactKind, BeanRef, DependencyEdge, DependencyGraph, DiagnosticCode,
                           DynamicUrl, EdgeKind, ExternalUrl, GraphBuilder, ResolvedArtifact, SourceLocation,
                           UnresolvedUrl, add_edge, error, is_unresolved, merge, warning)


def loc(path="a.jsp", line=1, col=1):
    return SourceLocation(path, line, col)


def test_location_is_one_based_and_uses_forward_slashes():
    with pytest.raises(ValueError):
        SourceLocation("x", 0, 1)
    assert SourceLocation("a\\b.jsp", 2, 3).file_path == "a/b.jsp"
    assert str(SourceLocation("a.jsp", 2, 3)) == "a.jsp:2:3"


def test_logical_names_sorted_and_unique():
    art = Artifact.for_path("X.java", ArtifactKind.ServletClass, ["b", "a", "b"])
    assert art.id == "X.java" and art.logical_names == ("a", "b")


def test_graph_is_canonical_regardless_of_input_order():
    arts = (Artifact.for_path("b.jsp", ArtifactKind.JspPage), Artifact.for_path("A.java", ArtifactKind.ServletClass))
    e1 = DependencyEdge("b.jsp", ResolvedArtifact("A.java"), EdgeKind.HrefLink, loc("b.jsp", 3))
    e2 = DependencyEdge("b.jsp", UnresolvedUrl("/x"), EdgeKind.HrefLink, loc("b.jsp", 1))
    g1 = DependencyGraph(arts, (e1, e2))
    g2 = DependencyGraph(arts[::-1], (e2, e1, e2))
    assert g1 == g2
    assert [a.id for a in g1.artifacts] == ["A.java", "b.jsp"]  # ServletClass ranks first
    assert g1.edges == (e2, e1)


def test_duplicate_edges_collapse_to_smallest_sort_key():
    a = Artifact.for_path("p.jsp", ArtifactKind.JspPage)
    base = dict(source="p.jsp", target=UnresolvedUrl("/x"), kind=EdgeKind.HrefLink, location=loc("p.jsp"))
    big = DependencyEdge(**base, attributes=(("z", "1"),))
    small = DependencyEdge(**base, attributes=(("a", "1"),))
    assert DependencyGraph((a,), (big, small)).edges == (small,)
    assert DependencyGraph((a,), (small, big)).edges == (small,)


def test_add_edge_checks_source_and_ignores_duplicates():
    g = DependencyGraph((Artifact.for_path("p.jsp", ArtifactKind.JspPage),))
    e = DependencyEdge("p.jsp", BeanRef("cart", "total"), EdgeKind.ElReference, loc("p.jsp"))
    g2 = add_edge(g, e)
    assert g2.edges == (e,)
    assert add_edge(g2, e) is g2
    with pytest.raises(ValueError):
        add_edge(g, DependencyEdge("q.jsp", BeanRef("x"), EdgeKind.ElReference, loc("q.jsp")))
    with pytest.raises(ValueError):
        GraphBuilder().add_edge(e)


def test_merge_reports_kind_conflict_and_keeps_first():
    g1 = DependencyGraph((Artifact.for_path("X.java", ArtifactKind.ServletClass, ["x"]),))
    g2 = DependencyGraph((Artifact.for_path("X.java", ArtifactKind.BeanClass, ["y"]),))
    m = merge([g1, g2])
    assert m.artifact("X.java").kind is ArtifactKind.ServletClass
    assert [d.code for d in m.diagnostics] == [DiagnosticCode.ARTIFACT_KIND_CONFLICT]
    assert merge([g1]) is g1


def test_merge_pools_logical_names():
    g1 = DependencyGraph((Artifact.for_path("X.java", ArtifactKind.ServletClass, ["x"]),))
    g2 = DependencyGraph((Artifact.for_path("X.java", ArtifactKind.ServletClass, ["y"]),))
    assert merge([g1, g2]).artifact("X.java").logical_names == ("x", "y")


def test_unresolved_and_diagnostic_text():
    assert is_unresolved(UnresolvedUrl("/x")) and is_unresolved(BeanRef("b"))
    assert not is_unresolved(DynamicUrl("why")) and not is_unresolved(ExternalUrl("http://x"))
    d = warning(DiagnosticCode.PATH_ESCAPE, "msg", loc("p.jsp", 2, 5))
    assert str(d) == "p.jsp:2:5: warning: PATH_ESCAPE: msg"
    assert str(error(DiagnosticCode.IO_ERROR, "gone")) == "error: IO_ERROR: gone"


# -- properties ------------------------------------------------------------

PATHS = ["a.jsp", "b.jsp", "c.xhtml", "S.java"]
KINDS = {"a.jsp": ArtifactKind.JspPage, "b.jsp": ArtifactKind.JspPage, "c.xhtml": ArtifactKind.JsfPage,
         "S.java": ArtifactKind.ServletClass}

targets = st.one_of(
    st.sampled_from(PATHS).map(ResolvedArtifact),
    st.sampled_from(["/x", "/y"]).map(UnresolvedUrl),
    st.sampled_from(["cart", "user"]).map(BeanRef),
)


@st.composite
def graphs(draw):
    paths = draw(st.lists(st.sampled_from(PATHS), min_size=1, max_size=4, unique=True))
    arts = tuple(Artifact.for_path(p, KINDS[p], draw(st.sets(st.sampled_from(["n1", "n2", "n3"])))) for p in paths)
    edges = draw(st.lists(st.builds(
        DependencyEdge,
        source=st.sampled_from(paths),
        target=targets,
        kind=st.sampled_from([EdgeKind.HrefLink, EdgeKind.ElReference, EdgeKind.JspIncludeAction]),
        location=st.builds(SourceLocation, st.sampled_from(PATHS), st.integers(1, 5), st.integers(1, 3)),
        attributes=st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from("xy")), max_size=2).map(tuple),
    ), max_size=8))
    return DependencyGraph(arts, tuple(edges))


@settings(max_examples=150, deadline=None)
@given(graphs(), graphs())
def test_merge_is_commutative_without_kind_conflicts(g1, g2):
    assert merge([g1, g2]) == merge([g2, g1])


@settings(max_examples=100, deadline=None)
@given(graphs(), graphs(), graphs())
def test_merge_is_associative(g1, g2, g3):
    assert merge([merge([g1, g2]), g3]) == merge([g1, merge([g2, g3])])


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_merge_is_idempotent(g):
    assert merge([g, g]) == g
