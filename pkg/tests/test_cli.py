from __future__ import annotations

import json
import subprocess
import sys

from corpus_support import CORPUS
from jeedeps.cli import main

FORM = CORPUS / "04_html_form"
INCLUDE = CORPUS / "05_jsp_include"  # has an unresolved "/myPage.jsp." include


def test_json_to_stdout(capsys):
    assert main([str(FORM)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [e["kind"] for e in data["edges"]] == ["HtmlFormAction"]


def test_output_file_and_formats(tmp_path):
    for fmt in ("json", "dot", "summary"):
        out = tmp_path / f"g.{fmt}"
        assert main([str(FORM), "--format", fmt, "-o", str(out)]) == 0
        assert out.read_text().endswith("\n")
    assert (tmp_path / "g.dot").read_text().startswith("digraph")


def test_strict_fails_on_unresolved_unless_excluded(tmp_path):
    out = str(tmp_path / "o.json")
    assert main([str(INCLUDE), "--strict", "-q", "-o", out]) == 1
    assert main([str(INCLUDE), "--strict", "-q", "--no-include-unresolved", "-o", out]) == 0
    assert main([str(FORM), "--strict", "-q", "-o", out]) == 0


def test_diagnostics_go_to_stderr_unless_quiet(capsys):
    main([str(CORPUS / "01_web_xml"), "--format", "summary"])
    main([str(CORPUS / "01_web_xml")])
    err = capsys.readouterr().err
    assert "UNKNOWN_SERVLET_NAME" in err
    main([str(CORPUS / "01_web_xml"), "-q"])
    assert capsys.readouterr().err == ""


def test_usage_and_root_errors(tmp_path, capsys):
    assert main(["--format", "png", str(FORM)]) == 2
    assert main([]) == 2
    assert main([str(FORM), "--jobs", "0"]) == 2
    assert main([str(tmp_path / "missing")]) == 3
    file_root = tmp_path / "file.txt"
    file_root.write_text("x")
    assert main([str(file_root)]) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jeedeps", str(FORM), "--format", "summary"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "HtmlFormAction: 1" in proc.stdout
