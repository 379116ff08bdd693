"""Command-line entry point.

Exit codes: 0 success, 1 findings under --strict, 2 usage error,
3 root directory missing or unreadable.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

from .build import AnalysisConfig, analyze_project
from .export import RENDERERS
from .model import Severity, is_unresolved

EXIT_OK, EXIT_STRICT, EXIT_USAGE, EXIT_ROOT = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jeedeps", description="Extract the web-tier dependency graph of a JEE project.")
    p.add_argument("root", type=Path, help="project root directory")
    p.add_argument("--format", choices=sorted(RENDERERS), default="json")
    p.add_argument("--output", "-o", type=Path, help="write the graph here instead of stdout")
    p.add_argument("--context-path", help="context path stripped from absolute URLs, e.g. /shop")
    p.add_argument("--case-insensitive-extensions", action="store_true",
                   help="match *.ext mappings ignoring case")
    p.add_argument("--include-unresolved", action=argparse.BooleanOptionalAction, default=True,
                   help="emit edges whose target could not be resolved (default: yes)")
    p.add_argument("--strict", action="store_true", help="exit 1 on unresolved targets or error diagnostics")
    p.add_argument("--quiet", "-q", action="store_true", help="do not print diagnostics to stderr")
    p.add_argument("--jobs", "-j", type=int, default=1, help="files scanned in parallel")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.jobs < 1:
        print("jeedeps: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    root: Path = args.root
    if not root.is_dir() or not os.access(root, os.R_OK | os.X_OK):
        print(f"jeedeps: cannot read project root {root}", file=sys.stderr)
        return EXIT_ROOT

    config = AnalysisConfig(root=root, context_path=args.context_path,
                            case_insensitive_extensions=args.case_insensitive_extensions,
                            include_unresolved=args.include_unresolved, jobs=args.jobs)
    graph = analyze_project(config)
    text = RENDERERS[args.format](graph)
    if args.output:
        args.output.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if not args.quiet and args.format != "summary":
        for d in graph.diagnostics:
            print(d, file=sys.stderr)

    if args.strict:
        failing = any(is_unresolved(e.target) for e in graph.edges) or \
            any(d.severity is Severity.Error for d in graph.diagnostics)
        if failing:
            return EXIT_STRICT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
