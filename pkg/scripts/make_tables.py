#!/usr/bin/env python3
"""Generate fusion tables for a batch of theories into an output directory.

Writes one JSON and one CSV table per theory instance:

    python scripts/make_tables.py --out tables/
"""

from __future__ import annotations

import argparse
from pathlib import Path

from verlinde.cli import main as cli_main

MINIMAL_PAIRS = [(5, 2), (4, 3), (7, 2), (5, 4)]
SL2_PAIRS = [(3, 2), (5, 2), (4, 3)]
SINGLET_PS = [2, 3, 4]


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="tables")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    jobs: list[tuple[str, list[str]]] = []
    for u, v in MINIMAL_PAIRS:
        jobs.append((f"minimal_{u}_{v}",
                     ["table", "--theory", "minimal", "--u", str(u), "--v", str(v)]))
    for u, v in SL2_PAIRS:
        jobs.append((f"sl2_{u}_{v}",
                     ["table", "--theory", "sl2", "--u", str(u), "--v", str(v),
                      "--l-range", "0:1", "--r-range", f"1:{u - 1}",
                      "--s-range", f"1:{v - 1}"]))
    for p in SINGLET_PS:
        jobs.append((f"singlet_{p}",
                     ["table", "--theory", "singlet", "--p", str(p),
                      "--r-range", "1:3"]))

    failures = 0
    for name, argv in jobs:
        for fmt in ("json", "csv"):
            dest = out / f"{name}.{fmt}"
            code = cli_main(argv + ["--seed", str(args.seed), "--format", fmt,
                                    "--no-timestamp", "--output", str(dest)])
            if code != 0:
                print(f"FAILED ({code}): {name} [{fmt}]")
                failures += 1
            else:
                print(f"wrote {dest}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(run())
