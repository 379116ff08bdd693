from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from jeedeps.urls import (Handler, MappingEntry, NoMatch, Origin, ResolveOptions, Shape, UrlMappingTable,
                          classify_pattern, normalize_url, page_dir, resolve)
from oracles import oracle_resolve


def table(*patterns):
    return UrlMappingTable([MappingEntry(classify_pattern(p), f"s{i}", Origin.Descriptor)
                            for i, p in enumerate(patterns)])


def winner(url, *patterns, **opts):
    h = resolve(url, table(*patterns), ResolveOptions(**opts))
    return h.pattern.raw if h else None


def test_classification():
    assert classify_pattern("/a/b").shape is Shape.Exact
    assert classify_pattern("/a/*").shape is Shape.PathPrefix
    assert classify_pattern("*.jsp").shape is Shape.Extension
    assert classify_pattern("/*").shape is Shape.Default
    assert classify_pattern("*").shape is Shape.Default
    assert not classify_pattern("hi").canonical
    assert classify_pattern("/hi").canonical


def test_precedence():
    pats = ("/*", "*.jsp", "/a/*", "/a/b/*", "/a/b/c.jsp")
    assert winner("/a/b/c.jsp", *pats) == "/a/b/c.jsp"
    assert winner("/a/b/d.jsp", *pats) == "/a/b/*"
    assert winner("/a/x.jsp", *pats) == "/a/*"
    assert winner("/z.jsp", *pats) == "*.jsp"
    assert winner("/z.html", *pats) == "/*"
    assert winner("/z.html", "*.jsp") is None
    assert resolve("/x", table()) is NoMatch and not NoMatch


def test_prefix_matches_whole_segments_only():
    assert winner("/ab", "/a/*") is None
    assert winner("/a", "/a/*") == "/a/*"


def test_extension_case_option():
    assert winner("/p.jsp", "*.JSP") is None
    assert winner("/p.jsp", "*.JSP", case_insensitive_extensions=True) == "*.JSP"


def test_ties_break_by_entry_order():
    h = resolve("/x", table("/x", "/x"))
    assert isinstance(h, Handler) and h.servlet_name == "s0"


def test_normalize_url():
    assert normalize_url("myPage.jsp", "/dir/").url == "/dir/myPage.jsp"
    assert normalize_url("../a.jsp?x=1#top", "/d/e/").url == "/d/a.jsp"
    assert normalize_url("/shop/cart.jsp", "/", "/shop").url == "/cart.jsp"
    assert normalize_url("/shopping/cart.jsp", "/", "/shop").url == "/shopping/cart.jsp"
    assert normalize_url("https://example.com/x").external
    assert normalize_url("//cdn.example.com/x").external
    assert normalize_url("mailto:a@b").external
    esc = normalize_url("../../x.jsp", "/a/")
    assert esc.clamped and esc.url == "/x.jsp"
    assert normalize_url("../../..", "/a/").url == "/"
    assert not normalize_url("../x.jsp", "/a/").clamped
    assert normalize_url("sub/", "/").url == "/sub/"
    assert page_dir("/a/b.jsp") == "/a/" and page_dir("/b.jsp") == "/"


# -- properties ------------------------------------------------------------

segs = st.sampled_from(["a", "b", "ab", "c"])
paths = st.lists(segs, min_size=1, max_size=3).map(lambda s: "/" + "/".join(s))
exts = st.sampled_from(["jsp", "JSP", "html"])
patterns = st.one_of(paths, paths.map(lambda p: p + "/*"), exts.map(lambda e: "*." + e), st.just("/*"))
urls = st.tuples(paths, st.one_of(st.just(""), exts.map(lambda e: "." + e))).map("".join)


@settings(max_examples=300)
@given(st.lists(patterns, max_size=8), urls, st.booleans())
def test_resolver_agrees_with_oracle(pats, url, fold):
    h = resolve(url, table(*pats), ResolveOptions(fold))
    got = int(h.servlet_name[1:]) if h else None
    assert got == oracle_resolve(url, pats, fold)


@given(st.lists(patterns, max_size=8), urls)
def test_exact_pattern_always_wins(pats, url):
    pats = pats + [url]
    h = resolve(url, table(*pats))
    assert h.pattern.shape is Shape.Exact and h.pattern.raw == url


@given(st.lists(patterns, max_size=8), urls, patterns)
def test_adding_non_matching_pattern_changes_nothing(pats, url, extra):
    if resolve(url, table(extra)):
        return
    before = resolve(url, table(*pats))
    after = resolve(url, table(*pats, extra))
    assert (before.pattern.raw if before else None) == (after.pattern.raw if after else None)


@given(st.lists(patterns, max_size=8), urls)
def test_longer_matching_prefix_takes_over(pats, url):
    h = resolve(url, table(*pats))
    if not h or h.pattern.shape is Shape.Exact:
        return
    longer = url.rsplit("/", 1)[0] or None
    if longer is None or (h.pattern.shape is Shape.PathPrefix and len(h.pattern.value) >= len(longer)):
        return
    assert resolve(url, table(*pats, longer + "/*")).pattern.raw == longer + "/*"


@given(paths, st.sampled_from(["", "/x", "/"]))
def test_normalize_is_idempotent(path, tail):
    once = normalize_url(path + tail, "/").url
    assert normalize_url(once, "/").url == once
