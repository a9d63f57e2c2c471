#!/usr/bin/env python3
"""Run every verification suite across a sweep of theory instances.

    python scripts/run_verification.py
    python scripts/run_verification.py --samples 30 --seed 7
"""

from __future__ import annotations

import argparse
import math
import time

from verlinde.checks import run_suite
from verlinde.scalar import Tolerance
from verlinde.semisimple import HeisenbergTheory, MinimalModelTheory, PiTheory
from verlinde.singlet import SingletTheory
from verlinde.sl2 import Sl2Theory


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--samples", type=int, default=20)
    args = parser.parse_args()
    tol = Tolerance()

    theories = []
    theories += [MinimalModelTheory(u, v)
                 for u in range(2, 8) for v in range(2, 8) if math.gcd(u, v) == 1]
    theories += [SingletTheory(p) for p in (2, 3, 4, 5)]
    theories += [Sl2Theory(u, v) for u, v in ((3, 2), (5, 2), (4, 3), (5, 3))]
    theories += [HeisenbergTheory(((1.0,),)),
                 HeisenbergTheory(((2.0, 0.5), (0.5, 1.0)), (0.1, -0.2)),
                 PiTheory(3, 2), PiTheory(5, 3)]

    failures = 0
    t0 = time.perf_counter()
    for theory in theories:
        results = run_suite(theory, "all", seed=args.seed,
                            n_samples=args.samples, tol=tol)
        for res in results:
            print(f"{theory!r:42s} {res.line()}")
            if not res.passed:
                failures += 1
    print(f"\n{time.perf_counter() - t0:.1f}s; "
          + ("ALL SUITES PASSED" if failures == 0 else f"{failures} FAILURES"))
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(run())
