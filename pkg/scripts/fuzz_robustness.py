"""Run the CLI over mutated copies of the corpus and tally what it reports.

A case fails if the CLI exits non-zero or raises, or if an XML file that
the stdlib parser rejects has no MALFORMED_XML diagnostic.

    python3 scripts/fuzz_robustness.py [--cases 500] [--seed 1]
"""
from __future__ import annotations

import argparse
import sys
import tempfile
import xml.etree.ElementTree as ET
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from corpus_support import analyze, fixtures, fuzz_corpus  # noqa: E402
from jeedeps.cli import main as cli_main  # noqa: E402
from jeedeps.model import DiagnosticCode  # noqa: E402


def xml_broken(path: Path) -> bool:
    try:
        ET.fromstring(path.read_bytes())
    except ET.ParseError:
        return True
    return False


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=100)
    ap.add_argument("--seed", type=int, default=99)
    args = ap.parse_args()

    codes: Counter = Counter()
    failures = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for root in fuzz_corpus(tmp / "cases", fixtures(), args.cases, args.seed):
            try:
                rc = cli_main([str(root), "--quiet", "--output", str(tmp / "out.json")])
            except Exception as exc:  # a crash is exactly what we are looking for
                failures.append(f"{root.name}: crashed with {exc!r}")
                continue
            if rc != 0:
                failures.append(f"{root.name}: exit {rc}")
            graph = analyze(root)
            codes.update(d.code.value for d in graph.diagnostics)
            flagged = {d.location.file_path for d in graph.diagnostics if d.code is DiagnosticCode.MALFORMED_XML}
            for xml_file in root.rglob("*.xml"):
                rel = xml_file.relative_to(root).as_posix()
                if xml_broken(xml_file) and rel not in flagged:
                    failures.append(f"{root.name}: {rel} unparseable but not reported")

    print(f"{args.cases} cases, {len(failures)} failures")
    for code, n in sorted(codes.items()):
        print(f"  {code:28} {n}")
    for f in failures:
        print("FAIL", f)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
