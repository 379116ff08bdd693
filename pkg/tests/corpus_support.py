"""Helpers shared by the corpus tests and the scripts in scripts/."""
from __future__ import annotations

import json
import random
import shutil
from pathlib import Path
from typing import Dict, List, Sequence, Set, Tuple

from jeedeps.build import AnalysisConfig, analyze_project
from jeedeps.export import target_json
from jeedeps.model import DependencyGraph, ResolvedArtifact

CORPUS = Path(__file__).parent / "corpus"
EXPECTED = "expected.json"


def fixtures() -> List[Path]:
    return sorted(p for p in CORPUS.iterdir() if (p / EXPECTED).is_file())


def load_expected(fixture: Path) -> dict:
    return json.loads((fixture / EXPECTED).read_text(encoding="utf-8"))


def _target(spec) -> str:
    if isinstance(spec, str):
        spec = {"type": "ResolvedArtifact", "artifact": spec}
    return json.dumps(spec, sort_keys=True)


EdgeKey = Tuple[str, str, str, int]


def expected_edges(spec: dict) -> Set[EdgeKey]:
    return {(e["kind"], e["source"], _target(e["target"]), e["line"]) for e in spec["edges"]}


def actual_edges(graph: DependencyGraph) -> Set[EdgeKey]:
    return {(e.kind.value, e.source, json.dumps(target_json(e.target), sort_keys=True), e.location.line)
            for e in graph.edges}


def expected_params(spec: dict) -> Dict[EdgeKey, list]:
    return {(e["kind"], e["source"], _target(e["target"]), e["line"]): e["params"]
            for e in spec["edges"] if "params" in e}


def actual_params(graph: DependencyGraph) -> Dict[EdgeKey, list]:
    return {(e.kind.value, e.source, json.dumps(target_json(e.target), sort_keys=True), e.location.line):
            [list(p) for p in e.params] for e in graph.edges}


def diagnostics(graph: DependencyGraph) -> Set[Tuple[str, str, int]]:
    return {(d.code.value, d.location.file_path if d.location else "", d.location.line if d.location else 0)
            for d in graph.diagnostics}


def analyze(root: Path, **kwargs) -> DependencyGraph:
    return analyze_project(AnalysisConfig(root=root, **kwargs))


def score(fixture: Path) -> dict:
    """Precision/recall of one fixture against its hand-traced edge list."""
    spec = load_expected(fixture)
    graph = analyze(fixture)
    want, got = expected_edges(spec), actual_edges(graph)
    hit = len(want & got)
    return {
        "fixture": fixture.name,
        "expected": len(want),
        "actual": len(got),
        "precision": hit / len(got) if got else 1.0,
        "recall": hit / len(want) if want else 1.0,
        "missing": sorted(want - got),
        "unexpected": sorted(got - want),
    }


# -- negative wrapping -----------------------------------------------------

def _java_string(line: str) -> str:
    body = line.strip().replace("\\", "\\\\").replace('"', '\\"')
    return f'String wrapped = "{body}";'


def wrap_lines(text: str, first: int, last: int, how: str) -> str:
    """Neutralise lines first..last (1-based) without changing the line count."""
    lines = text.split("\n")
    seg = lines[first - 1:last]
    if how == "java-line":
        seg = ["// " + s for s in seg]
    elif how == "java-block":
        seg[0] = "/* " + seg[0]
        seg[-1] = seg[-1] + " */"
    elif how == "java-string":
        seg = [_java_string(s) for s in seg]
    elif how == "xml-comment":
        seg[0] = "<!-- " + seg[0]
        seg[-1] = seg[-1] + " -->"
    elif how == "jsp-comment":
        seg[0] = "<%-- " + seg[0]
        seg[-1] = seg[-1] + " --%>"
    elif how == "jsp-string":
        seg = ["<% " + _java_string(s) + " %>" for s in seg]
    else:
        raise ValueError(f"unknown wrap {how!r}")
    lines[first - 1:last] = seg
    return "\n".join(lines)


def wrapped_copy(fixture: Path, dest: Path, case: dict) -> Path:
    target = dest / fixture.name
    shutil.copytree(fixture, target)
    path = target / case["file"]
    text = path.read_text(encoding="utf-8")
    first, last = case["lines"]
    path.write_text(wrap_lines(text, first, last, case["wrap"]), encoding="utf-8")
    return target


def negative_violations(graph: DependencyGraph, case: dict) -> List[str]:
    first, last = case["lines"]
    bad = []
    for e in graph.edges:
        if e.kind.value in case.get("absent", ()) and e.location.file_path == case["file"] \
                and first <= e.location.line <= last:
            bad.append(f"{e.kind.value} at {e.location}")
        if isinstance(e.target, ResolvedArtifact) and e.target.artifact_id in case.get("absent_targets", ()):
            bad.append(f"{e.kind.value} at {e.location} still reaches {e.target.artifact_id}")
    return bad


# -- fuzzing ---------------------------------------------------------------

_GARBAGE = ["<", ">", "<%", "%>", "<jsp:include page=", "${", "#{a.b(", "\"", "</", "<!--", "<![CDATA[",
            "\x00", "�", "@WebServlet(", "/*", "'"]


def mutate(text: str, rng: random.Random, is_xml: bool) -> str:
    op = rng.randrange(6)
    if not text:
        return rng.choice(_GARBAGE)
    cut = rng.randrange(len(text))
    if op == 0:  # truncation
        return text[:cut]
    if op == 1:  # drop a tag delimiter
        idx = [i for i, ch in enumerate(text) if ch in "<>\"'{}"]
        if idx:
            i = rng.choice(idx)
            return text[:i] + text[i + 1:]
        return text[:cut]
    if op == 2:  # insert garbage
        return text[:cut] + rng.choice(_GARBAGE) + text[cut:]
    if op == 3 and is_xml:  # entity declaration
        return '<!DOCTYPE web-app [<!ENTITY x "boom">]>\n' + text
    if op == 4:  # duplicate a slice (unbalanced nesting)
        j = rng.randrange(cut, len(text) + 1)
        return text[:j] + text[cut:j] + text[j:]
    return text[:cut] + "</" + text[cut:]


def fuzz_corpus(dest: Path, sources: Sequence[Path], n: int = 100, seed: int = 99) -> List[Path]:
    """Copies of the fixtures with one or two files mutated each, deterministically."""
    rng = random.Random(seed)
    made = []
    for k in range(n):
        fx = sources[k % len(sources)]
        root = dest / f"{k:03d}_{fx.name}"
        shutil.copytree(fx, root, ignore=shutil.ignore_patterns("expected.json"))
        files = sorted(p for p in root.rglob("*") if p.is_file())
        for victim in rng.sample(files, k=min(len(files), rng.randint(1, 2))):
            text = victim.read_text(encoding="utf-8")
            victim.write_text(mutate(text, rng, victim.suffix == ".xml"), encoding="utf-8")
        made.append(root)
    return made
