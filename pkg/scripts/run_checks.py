#!/usr/bin/env python3
"""Run the full verification battery over a directory of instances and print
one line per (instance, check): a quick health dashboard for a corpus.

Usage: python3 scripts/run_checks.py [directory] (default: corpus/)
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from loghodge.cli import corpus_entry


def flatten(entry):
    rows = []
    rows.append(("validate", entry["validate"]["verdict"]))
    for kind, rep in entry["cohomology"].items():
        dims = {r["degree"]: r["dim"] for r in rep}
        rows.append((f"cohomology[{kind}]", str(dims)))
    if "imhs" in entry:
        rows.append(("imhs", entry["imhs"]["verdict"]))
    for mode, verdict in entry.get("purity", {}).items():
        rows.append((f"purity[{mode}]", verdict["verdict"]))
    if "link" in entry:
        dims = {r["degree"]: r["dim"] for r in entry["link"]}
        rows.append(("link", str(dims)))
    return rows


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else \
        Path(__file__).resolve().parent.parent / "corpus"
    paths = sorted(p for p in root.glob("*.json")
                   if not p.name.endswith(".expected.json"))
    failures = 0
    for path in paths:
        entry = corpus_entry(str(path))
        for check, value in flatten(entry):
            status = value if value in ("pass", "fail") else value
            if value == "fail":
                failures += 1
            print(f"{path.name:<28} {check:<20} {status}")
    print(f"\n{len(paths)} instances, {failures} failing checks")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
