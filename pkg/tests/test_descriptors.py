from __future__ import annotations

from jeedeps.descriptors import (ClassTarget, ConfigFile, JspFileTarget, page_path, parse_faces_config,
                                 parse_web_xml)
from jeedeps.model import DiagnosticCode, Severity


def codes(diags):
    return [d.code for d in diags]


def test_standard_servlet_blocks():
    xml = """<web-app xmlns="https://jakarta.ee/xml/ns/jakartaee">
  <servlet><servlet-name>a</servlet-name><servlet-class>x.A</servlet-class></servlet>
  <servlet><servlet-name>b</servlet-name><jsp-file>/WEB-INF/b.jsp</jsp-file></servlet>
  <servlet-mapping><servlet-name>a</servlet-name><url-pattern>/a</url-pattern><url-pattern>*.do</url-pattern></servlet-mapping>
  <servlet-mapping><servlet-name>b</servlet-name><url-pattern>/b</url-pattern></servlet-mapping>
</web-app>"""
    decls, maps, diags = parse_web_xml(xml, "WEB-INF/web.xml")
    assert diags == []
    assert [(d.servlet_name, d.target) for d in decls] == [("a", ClassTarget("x.A")), ("b", JspFileTarget("/WEB-INF/b.jsp"))]
    assert [(m.servlet_name, m.url_patterns) for m in maps] == [("a", ("/a", "*.do")), ("b", ("/b",))]
    assert maps[0].locations[1].line == 4


def test_prefixed_namespace_is_ignored():
    xml = '<j:web-app xmlns:j="http://java.sun.com/xml/ns/javaee"><j:servlet><j:servlet-name>a</j:servlet-name>' \
          '<j:servlet-class>A</j:servlet-class></j:servlet></j:web-app>'
    decls, _, diags = parse_web_xml(xml, "web.xml")
    assert [d.target for d in decls] == [ClassTarget("A")] and diags == []


def test_invalid_declarations():
    xml = """<web-app>
  <servlet><servlet-name>none</servlet-name></servlet>
  <servlet><servlet-name>two</servlet-name><servlet-class>A</servlet-class><jsp-file>/b.jsp</jsp-file></servlet>
  <servlet-mapping><servlet-name>two</servlet-name></servlet-mapping>
</web-app>"""
    decls, maps, diags = parse_web_xml(xml, "web.xml")
    assert [d.target for d in decls] == [ClassTarget("A")]
    assert maps == []
    assert codes(diags) == [DiagnosticCode.INVALID_SERVLET_DECLARATION] * 3


def test_truncated_xml_keeps_prefix_and_reports_error():
    xml = "<web-app><servlet><servlet-name>a</servlet-name><servlet-class>A</servlet-class></servlet><servlet-map"
    decls, maps, diags = parse_web_xml(xml, "web.xml")
    assert [d.servlet_name for d in decls] == ["a"]
    assert codes(diags) == [DiagnosticCode.MALFORMED_XML]
    assert diags[0].severity is Severity.Error


def test_entity_declarations_are_refused():
    xml = '<!DOCTYPE web-app [<!ENTITY e "x">]><web-app><servlet><servlet-name>&e;</servlet-name></servlet></web-app>'
    _, _, diags = parse_web_xml(xml, "web.xml")
    assert codes(diags) == [DiagnosticCode.MALFORMED_XML]
    assert "entity" in diags[0].message


def test_external_dtd_is_not_fetched():
    xml = '<!DOCTYPE web-app SYSTEM "http://example.invalid/web-app.dtd"><web-app/>'
    decls, maps, diags = parse_web_xml(xml, "web.xml")
    assert (decls, maps, diags) == ([], [], [])


def test_faces_config():
    xml = """<faces-config>
  <managed-bean>
    <managed-bean-name>cart</managed-bean-name>
    <managed-bean-class>shop.Cart</managed-bean-class>
    <managed-property><property-name>user</property-name><value>#{user}</value></managed-property>
  </managed-bean>
  <managed-bean><managed-bean-name>broken</managed-bean-name></managed-bean>
</faces-config>"""
    regs, diags = parse_faces_config(xml, "WEB-INF/faces-config.xml")
    assert [(r.bean_name, r.bean_class, r.properties) for r in regs] == [("cart", "shop.Cart", (("user", "#{user}"),))]
    assert isinstance(regs[0].source, ConfigFile) and regs[0].source.location.line == 2
    assert codes(diags) == [DiagnosticCode.INCOMPLETE_MANAGED_BEAN]


def test_page_path_normalises():
    assert page_path(JspFileTarget("Page1.jsp")) == "/Page1.jsp"
    assert page_path(JspFileTarget("/a/./b/../c.jsp")) == "/a/c.jsp"
