"""Score the analyzer against the hand-traced conformance corpus.

Prints precision/recall per fixture and the wall time of the whole run;
exits 1 if any fixture is below 100%.

    python3 scripts/run_corpus.py [--verbose]
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from corpus_support import fixtures, score  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--verbose", "-v", action="store_true", help="list missing and unexpected edges")
    args = ap.parse_args()

    start = time.perf_counter()
    rows = [score(fx) for fx in fixtures()]
    elapsed = time.perf_counter() - start

    print(f"{'fixture':28} {'exp':>4} {'got':>4} {'prec':>6} {'rec':>6}")
    for r in rows:
        print(f"{r['fixture']:28} {r['expected']:4d} {r['actual']:4d} {r['precision']:6.1%} {r['recall']:6.1%}")
        if args.verbose:
            for edge in r["missing"]:
                print("   missing   ", edge)
            for edge in r["unexpected"]:
                print("   unexpected", edge)
    perfect = all(r["precision"] == r["recall"] == 1.0 for r in rows)
    print(f"\n{len(rows)} fixtures, {sum(r['expected'] for r in rows)} edges, {elapsed:.3f}s, "
          f"{'all exact' if perfect else 'MISMATCH'}")
    return 0 if perfect else 1


if __name__ == "__main__":
    sys.exit(main())
